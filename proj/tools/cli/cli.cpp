// Copyright 2026 The fieldport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "config.hpp"
#include "fieldport/amplitude.hpp"
#include "fieldport/error.hpp"
#include "fieldport/measurement.hpp"
#include "fieldport/nonrel.hpp"
#include "fieldport/propagator.hpp"
#include "output.hpp"

namespace fieldport::cli {

using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::optional<int> threads;
    std::optional<double> P;
    bool dual_route = false;
    int dim = 2;
    int trials = 100;
    std::optional<std::uint64_t> seed;
};

struct Report {
    json results = json::object();
    json checks = json::array();
    std::vector<std::pair<std::string, std::string>> files;  // name, content

    void check(const std::string &name, bool pass, double value, const std::string &relation, double bound) {
        checks.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"relation", relation}, {"bound", bound}});
    }
};

std::string g17(double v) {
    return format_double(v);
}

json conventions_json(const Conventions &conv) {
    return {{"metric", "+---"},
            {"units", "hbar = c = 1, lengths in 1/m"},
            {"spatial_dims", conv.spatial_dims},
            {"mass", conv.mass},
            {"contraction_norm", conv.contraction_norm},
            {"closed_form_calibration", conv.closed_form_calibration}};
}

std::vector<std::string> spatial_header(int dims) {
    std::vector<std::string> h;
    for (int i = 1; i <= dims; ++i) {
        h.push_back("x" + std::to_string(i));
    }
    return h;
}

std::string join_components(const std::vector<double> &v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        s += (i ? " " : "") + g17(v[i]);
    }
    return s;
}

Scenario scenario_from(const ScenarioConfig &c) {
    Scenario s;
    s.conv = c.conv;
    s.packet = c.packet;
    s.epr = EPRFamily::delta_normalized(c.epr_sigma, c.epr_q, c.times.t_pair);
    s.xi0 = c.times.t_meas;
    s.t_out = c.times.t_out;
    return s;
}

// Scenario carrying only the labels and times, for the symbolic expansion.
Scenario label_scenario(const ScenarioConfig &c) {
    Scenario s;
    s.conv = default_conventions(1, c.conv.mass);
    s.packet = GaussianPacket{{0.0}, c.packet.sigma_k, {0.0}, c.times.t_packet};
    s.epr = EPRFamily::delta_normalized(c.epr_sigma > 0 ? c.epr_sigma : 0.125, {0.0}, c.times.t_pair);
    s.xi0 = c.times.t_meas;
    s.t_out = c.times.t_out;
    return s;
}

Report propagator_scan(const ScenarioConfig &c, int threads) {
    const int dims = c.conv.spatial_dims;
    Conventions closed = dims == 3 ? calibrated(c.conv) : c.conv;
    std::vector<FourVector> pts;
    size_t skipped = 0;
    for (double t : c.scan_t) {
        for (double r : c.scan_r) {
            FourVector x{t, SpatialVector(dims, 0.0)};
            x.x[0] = r;
            if (std::abs(x.interval()) < kLightConeGuard) {
                ++skipped;
                continue;
            }
            pts.push_back(x);
        }
    }
    struct Row {
        PropagatorValue q, cf;
        Branch branch = Branch::spacelike;
    };
    std::vector<Row> rows(pts.size());
    parallel_for(pts.size(), threads, [&](size_t i) {
        rows[i].q = dplus_quadrature(pts[i], c.conv);
        rows[i].cf = dims == 3 ? dplus_closed_form(pts[i], closed) : dplus_closed_form_1d(pts[i], c.conv);
        rows[i].branch = classify(pts[i]);
    });

    auto header = spatial_header(dims);
    header.insert(header.begin(), "t");
    for (const char *h : {"re", "im", "est_error", "branch"}) {
        header.emplace_back(h);
    }
    CsvTable csv(header);
    double worst = 0.0;
    std::vector<Series> series;
    for (size_t i = 0; i < pts.size(); ++i) {
        std::vector<std::string> row{g17(pts[i].t)};
        for (double xi : pts[i].x) {
            row.push_back(g17(xi));
        }
        row.push_back(g17(rows[i].q.value.real()));
        row.push_back(g17(rows[i].q.value.imag()));
        row.push_back(g17(rows[i].q.est_error));
        row.push_back(to_string(rows[i].branch));
        csv.add_row(row);
        worst = std::max(worst, std::abs(rows[i].q.value - rows[i].cf.value) / std::abs(rows[i].q.value));
        if (series.empty() || series.back().name != "t = " + g17(pts[i].t)) {
            series.push_back({"t = " + g17(pts[i].t), {}, {}});
        }
        series.back().x.push_back(pts[i].x[0]);
        series.back().y.push_back(std::log10(std::abs(rows[i].q.value)));
    }
    Report r;
    r.results = {{"points", pts.size()},
                 {"skipped_guard_band", skipped},
                 {"max_closed_form_relative_difference", worst},
                 {"closed_form_calibration", closed.closed_form_calibration}};
    r.check("closed_form_agreement", worst <= 1e-6, worst, "<=", 1e-6);
    r.files.emplace_back("propagator-scan.csv", csv.str());
    r.files.emplace_back("propagator-scan.svg",
                         svg_line_plot("log10 |D+(t, x1)| by quadrature", "x1 (1/m)", "log10 |D+|", series));
    return r;
}

std::vector<FourVector> spacelike_points(int n, double max_time, int dims) {
    std::vector<FourVector> pts;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double t = n > 1 ? max_time * (2.0 * i / (n - 1) - 1.0) : 0.0;
        double r = std::abs(t) + 0.05 + 2.0 * ((i * 37) % n) / n;
        FourVector x{t, SpatialVector(dims, 0.0)};
        if (dims == 1) {
            x.x[0] = i % 2 ? -r : r;
        } else {
            double cz = 1.0 - 2.0 * (i + 0.5) / n;
            double sz = std::sqrt(1.0 - cz * cz);
            x.x = {r * sz * std::cos(golden * i), r * sz * std::sin(golden * i), r * cz};
        }
        pts.push_back(x);
    }
    return pts;
}

Report microcausality(const ScenarioConfig &c, int threads) {
    const int dims = c.conv.spatial_dims;
    Conventions closed = dims == 3 ? calibrated(c.conv) : c.conv;
    auto pts = spacelike_points(c.micro_points, c.micro_max_time, dims);
    struct Row {
        double pj_closed = 0, dp_closed = 0, pj_quad = 0, est = 0;
    };
    std::vector<Row> rows(pts.size());
    parallel_for(pts.size(), threads, [&](size_t i) {
        rows[i].pj_closed = std::abs(pauli_jordan(pts[i], closed, Method::closed_form).value);
        rows[i].dp_closed = std::abs(dplus(pts[i], closed, Method::closed_form).value);
        auto q = dplus_quadrature(pts[i], c.conv);
        rows[i].pj_quad = std::abs(q.value + std::conj(q.value));
        rows[i].est = q.est_error;
    });
    auto header = spatial_header(dims);
    header.insert(header.begin(), "t");
    for (const char *h : {"interval", "abs_pj_closed", "abs_dplus_closed", "abs_pj_quad", "est_error", "pass"}) {
        header.emplace_back(h);
    }
    CsvTable csv(header);
    double worst_closed = 0.0, worst_quad = 0.0;
    size_t failures = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const auto &w = rows[i];
        bool ok_closed = w.pj_closed <= 1e-12 * w.dp_closed;
        bool ok_quad = w.pj_quad <= 10.0 * w.est;
        worst_closed = std::max(worst_closed, w.pj_closed / w.dp_closed);
        double q_ratio = w.pj_quad == 0.0 ? 0.0 : w.pj_quad / w.est;
        worst_quad = std::max(worst_quad, q_ratio);
        failures += !(ok_closed && ok_quad);
        std::vector<std::string> row{g17(pts[i].t)};
        for (double xi : pts[i].x) {
            row.push_back(g17(xi));
        }
        for (double v : {pts[i].interval(), w.pj_closed, w.dp_closed, w.pj_quad, w.est}) {
            row.push_back(g17(v));
        }
        row.emplace_back(ok_closed && ok_quad ? "pass" : "fail");
        csv.add_row(row);
    }
    Report r;
    r.results = {{"points", pts.size()},
                 {"failing_points", failures},
                 {"max_closed_ratio", worst_closed},
                 {"max_quadrature_over_est_error", worst_quad}};
    r.check("spacelike_point_count", pts.size() >= 50, static_cast<double>(pts.size()), ">=", 50);
    r.check("closed_form_commutator", worst_closed <= 1e-12, worst_closed, "<=", 1e-12);
    r.check("quadrature_commutator", worst_quad <= 10.0, worst_quad, "<=", 10.0);
    r.files.emplace_back("microcausality.csv", csv.str());
    return r;
}

Report decay(const ScenarioConfig &c, int) {
    Report r;
    CsvTable csv({"mass", "s", "corrected_log", "fit"});
    std::vector<Series> series;
    json fits = json::array();
    for (double m : c.decay_masses) {
        auto conv = default_conventions(c.conv.spatial_dims, m);
        auto fit = decay_fit(m, 2.0 / m, 6.0 / m, c.decay_samples, conv);
        double rel = std::abs(-fit.slope - m) / m;
        fits.push_back({{"mass", m},
                        {"s_range", {2.0 / m, 6.0 / m}},
                        {"slope", fit.slope},
                        {"intercept", fit.intercept},
                        {"rms_residual", fit.rms_residual},
                        {"rate_relative_error", rel}});
        r.check("rate_within_5_percent_m=" + g17(m), rel <= 0.05, rel, "<=", 0.05);
        Series data{"log|D+| corrected, m = " + g17(m), fit.s, fit.corrected_log};
        Series line{"fit, m = " + g17(m), fit.s, {}};
        for (size_t i = 0; i < fit.s.size(); ++i) {
            double v = fit.intercept + fit.slope * fit.s[i];
            line.y.push_back(v);
            csv.add_row({g17(m), g17(fit.s[i]), g17(fit.corrected_log[i]), g17(v)});
        }
        series.push_back(std::move(data));
        series.push_back(std::move(line));
    }
    r.results = {{"fits", fits}};
    r.files.emplace_back("decay-fit.csv", csv.str());
    r.files.emplace_back("decay-fit.svg", svg_line_plot("Spacelike decay of D+", "s (1/m)", "corrected log|D+|", series));
    return r;
}

json completeness_json(const CompletenessReport &rep, const MomentumGrid &g) {
    return {{"n_points", g.n_points},
            {"spacing", g.spacing},
            {"defect_interior", rep.defect_interior},
            {"defect_full", rep.defect_full},
            {"interior_size", rep.interior_size},
            {"boundary_size", rep.boundary_size},
            {"outcomes", rep.outcomes},
            {"min_eigenvalue", rep.min_eigenvalue}};
}

Report povm_check(const ScenarioConfig &c, int threads) {
    MomentumGrid g = c.grid;
    MomentumGrid fine{g.dims, 2 * g.n_points - 1, g.spacing / 2.0};
    CompletenessOptions opts;
    opts.xi0 = c.times.t_meas;
    opts.threads = threads;
    auto nr = completeness_defect(PovmFamily::nonrelativistic, g, c.conv, opts);
    auto coarse = completeness_defect(PovmFamily::relativistic, g, c.conv, opts);
    auto refined = completeness_defect(PovmFamily::relativistic, fine, c.conv, opts);
    double ratio = coarse.defect_interior / refined.defect_interior;

    Report r;
    r.results = {{"grid", {{"dims", g.dims}, {"n_points", g.n_points}, {"spacing", g.spacing}}},
                 {"lattice_sizes",
                  {{"outcomes", g.outcome_count()},
                   {"interior", nr.interior_size},
                   {"boundary", nr.boundary_size},
                   {"refined_outcomes", fine.outcome_count()}}},
                 {"defect_interior", nr.defect_interior},
                 {"defect_full", nr.defect_full},
                 {"refinement_ratio", ratio},
                 {"xi0", opts.xi0},
                 {"relativistic", {{"coarse", completeness_json(coarse, g)}, {"refined", completeness_json(refined, fine)}}}};
    r.check("nonrelativistic_interior_defect", nr.defect_interior <= 1e-10, nr.defect_interior, "<=", 1e-10);
    r.check("relativistic_refinement_ratio", ratio >= 1.8, ratio, ">=", 1.8);
    if (g.dims == 1) {
        double phi = phi_completeness_defect(g);
        r.results["phi_completeness_defect"] = phi;
        r.check("position_kernel_completeness", phi <= 1e-12, phi, "<=", 1e-12);
    }
    CsvTable csv({"family", "n_points", "spacing", "defect_interior", "defect_full", "min_eigenvalue"});
    auto add = [&](const char *family, const MomentumGrid &grid, const CompletenessReport &rep) {
        csv.add_row({family, std::to_string(grid.n_points), g17(grid.spacing), g17(rep.defect_interior),
                     g17(rep.defect_full), g17(rep.min_eigenvalue)});
    };
    add("nonrelativistic", g, nr);
    add("relativistic", g, coarse);
    add("relativistic", fine, refined);
    r.files.emplace_back("povm-check.csv", csv.str());
    return r;
}

Report amplitude_scan(const ScenarioConfig &c, const Flags &f, int threads) {
    if (c.conv.spatial_dims != 1) {
        throw InvalidArgument("amplitude-scan needs conventions.spatial_dims = 1");
    }
    Scenario s = scenario_from(c);
    s.validate();
    s.packet = normalized(s.packet, s.conv);
    std::vector<double> Ps = f.P ? std::vector<double>{*f.P} : c.lattice_P;
    const auto &Xs = c.lattice_X;
    const auto &xs = c.lattice_x;
    const size_t nX = Xs.size(), nP = Ps.size(), nx = xs.size();
    const size_t n = nX * nP * nx;
    auto probe = [&](size_t i) {
        size_t ix = i % nx, ip = (i / nx) % nP, iX = i / (nx * nP);
        return std::tuple{Outcome{{Xs[iX]}, {Ps[ip]}}, xs[ix]};
    };
    std::vector<AmplitudeBreakdown> rows(n);
    parallel_for(n, threads, [&](size_t i) {
        auto [oc, x] = probe(i);
        rows[i] = total_amplitude(s, oc, x);
    });

    Report r;
    double dual_worst = 0.0;
    if (f.dual_route) {
        auto exp = symbolic_amplitude(s);
        const size_t nt = exp.terms.size();
        std::vector<std::complex<double>> pos(n * nt);
        parallel_for(n * nt, threads, [&](size_t k) {
            auto [oc, x] = probe(k / nt);
            pos[k] = term_value_position(exp.terms[k % nt], s, oc, x).value;
        });
        for (size_t k = 0; k < n * nt; ++k) {
            auto mom = rows[k / nt].terms[k % nt].value;
            dual_worst = std::max(dual_worst, std::abs(pos[k] - mom) / std::abs(mom));
        }
        r.results["dual_route_max_relative_difference"] = dual_worst;
        r.check("dual_route_agreement", dual_worst <= 1e-3, dual_worst, "<=", 1e-3);
    }

    CsvTable csv({"X", "P", "x", "re_total", "im_total", "re_t1", "im_t1", "re_t2", "im_t2", "re_par", "im_par",
                  "est_error"});
    size_t partial = 0;
    std::vector<std::vector<double>> heat(nX, std::vector<double>(nx, 0.0));
    for (size_t i = 0; i < n; ++i) {
        auto [oc, x] = probe(i);
        const auto &b = rows[i];
        partial += b.partial;
        std::vector<std::string> row{g17(oc.X[0]), g17(oc.P[0]), g17(x), g17(b.total.real()), g17(b.total.imag())};
        for (size_t t = 0; t < 3; ++t) {
            auto v = t < b.terms.size() ? b.terms[t].value : std::complex<double>(NAN, NAN);
            row.push_back(g17(v.real()));
            row.push_back(g17(v.imag()));
        }
        row.push_back(g17(b.est_error));
        csv.add_row(row);
        if ((i / nx) % nP == 0) {
            heat[i / (nx * nP)][i % nx] = std::norm(b.total);
        }
    }
    json weights = json::array();
    for (const auto &t : rows.front().terms) {
        weights.push_back({{"tag", to_string(t.tag)}, {"weight", t.weight}});
    }
    r.results["probes"] = n;
    r.results["P_values"] = Ps;
    r.results["term_weights"] = weights;
    r.results["partial_probes"] = partial;
    r.results["heatmap_P"] = Ps.front();
    r.check("all_terms_evaluated", partial == 0, static_cast<double>(partial), "==", 0);
    r.files.emplace_back("amplitude-scan.csv", csv.str());
    r.files.emplace_back("amplitude-scan.svg", svg_heatmap("|total amplitude|^2 at P = " + g17(Ps.front()),
                                                           "x (1/m)", "X (1/m)", xs, Xs, heat));
    return r;
}

Report nr_limit(const ScenarioConfig &c, int threads) {
    const MomentumGrid &g = c.grid;
    auto f = NRPacket::gaussian(g, c.packet.x_center, 1.0 / (2.0 * c.packet.sigma_k), c.packet.k_center);
    auto amp = nr_limit_expansion(symbolic_amplitude(label_scenario(c)));
    Report r;
    json terms = json::array();
    std::vector<int> w;
    for (const auto &t : amp.terms) {
        terms.push_back({{"tag", to_string(t.tag)}, {"weight", t.weight}, {"formula", t.formula}});
        w.push_back(t.weight);
    }
    r.results["symbolic_form"] = terms;
    bool weights_ok = w == std::vector<int>{2, 2, 4};
    r.check("three_term_weights_2_2_4", weights_ok, weights_ok ? 1.0 : 0.0, "==", 1);

    // Direct term against the shifted packet, everywhere on the ring.
    const size_t nO = g.outcome_count(), nR = g.size();
    double peak = 0.0;
    size_t peak_at = 0;
    for (size_t j = 0; j < nR; ++j) {
        if (std::abs(f.values[j]) > peak) {
            peak = std::abs(f.values[j]);
            peak_at = j;
        }
    }
    std::vector<double> worst(nO, 0.0);
    std::vector<char> parasitic_nonzero(nO, 0);
    parallel_for(nO, threads, [&](size_t o) {
        auto oc = g.outcome(o);
        for (size_t j = 0; j < nR; ++j) {
            auto x = f.position(j);
            auto lit = nr_teleport_amplitude(f, oc, x);
            worst[o] = std::max(worst[o], std::abs(nr_term_value(amp.terms[0], f, oc, x) - lit));
        }
        parasitic_nonzero[o] = nr_term_value(amp.terms[2], f, oc, f.position(peak_at)) != std::complex<double>(0.0);
    });
    double direct = *std::max_element(worst.begin(), worst.end()) / peak;
    r.results["direct_term_max_relative_difference"] = direct;
    r.check("direct_term_is_shifted_packet", direct <= 1e-14, direct, "<=", 1e-14);

    size_t par_count = 0;
    bool par_origin = true;
    for (size_t o = 0; o < nO; ++o) {
        if (parasitic_nonzero[o]) {
            ++par_count;
            auto oc = g.outcome(o);
            for (size_t d = 0; d < oc.X.size(); ++d) {
                par_origin = par_origin && std::abs(oc.X[d]) < 1e-12 && std::abs(oc.P[d]) < 1e-12;
            }
        }
    }
    r.results["parasitic_support_outcomes"] = par_count;
    r.check("parasitic_only_at_origin", par_origin && par_count == 1, static_cast<double>(par_count), "==", 1);

    auto prob = nr_outcome_probability(f);
    double mean = 0.0;
    for (double p : prob) {
        mean += p;
    }
    mean /= static_cast<double>(prob.size());
    double flat = 0.0;
    CsvTable csv({"X", "P", "prob"});
    for (size_t o = 0; o < nO; ++o) {
        flat = std::max(flat, std::abs(prob[o] - mean) / mean);
        auto oc = g.outcome(o);
        csv.add_row({join_components(oc.X), join_components(oc.P), g17(prob[o])});
    }
    r.results["probability_mean"] = mean;
    r.results["probability_max_relative_deviation"] = flat;
    r.check("probability_map_flat", flat <= 1e-10, flat, "<=", 1e-10);

    // Ideal pair against the measurement states on three 1D lattices.
    json sizes = json::array();
    bool scaling = true;
    for (int n : {g.n_points, 2 * g.n_points + 1, 4 * g.n_points + 3}) {
        MomentumGrid h{1, n, g.spacing};
        auto ref = std::abs(nr_epr_overlap({0.0}, Outcome{{0.0}, {0.0}}, h));
        size_t nonzero = 0;
        bool origin_only = true;
        for (size_t o = 0; o < h.outcome_count(); ++o) {
            auto oc = h.outcome(o);
            if (std::abs(nr_epr_overlap({0.0}, oc, h)) > 1e-9 * ref) {
                ++nonzero;
                origin_only = origin_only && std::abs(oc.X[0]) < 1e-12 && std::abs(oc.P[0]) < 1e-12;
            }
        }
        double fraction = static_cast<double>(nonzero) / static_cast<double>(h.outcome_count());
        scaling = scaling && origin_only && nonzero == 1;
        sizes.push_back({{"n_points", n}, {"outcomes", h.outcome_count()}, {"nonzero", nonzero}, {"fraction", fraction}});
    }
    r.results["epr_zero_measure"] = sizes;
    r.check("epr_overlap_zero_measure", scaling, scaling ? 1.0 : 0.0, "==", 1);

    r.files.emplace_back("nr-limit.csv", csv.str());
    if (g.dims == 1) {
        std::vector<double> Xs, Ps;
        for (int i = 0; i < g.n_points; ++i) {
            Xs.push_back(g.outcome(static_cast<size_t>(i)).X[0]);
            Ps.push_back(g.axis_value(i));
        }
        std::vector<std::vector<double>> heat(Ps.size(), std::vector<double>(Xs.size()));
        for (size_t o = 0; o < nO; ++o) {
            heat[o / Xs.size()][o % Xs.size()] = prob[o];
        }
        r.files.emplace_back("nr-limit.svg", svg_heatmap("Lattice outcome probability", "X", "P", Xs, Ps, heat));
    }
    return r;
}

Report teleport(const ScenarioConfig &c, const Flags &f) {
    std::uint64_t seed = f.seed.value_or(c.seed);
    auto st = teleport_trials(f.dim, f.trials, seed);
    Report r;
    r.results = {{"dim", st.dim},
                 {"trials", st.trials},
                 {"seed", seed},
                 {"per_outcome_probability", st.mean_probability},
                 {"expected_probability", 1.0 / (f.dim * f.dim)},
                 {"max_probability_deviation", st.max_probability_deviation},
                 {"min_fidelity", st.min_fidelity},
                 {"mean_fidelity", st.mean_fidelity}};
    r.check("uniform_outcome_probability", st.max_probability_deviation <= 1e-12, st.max_probability_deviation,
            "<=", 1e-12);
    r.check("corrected_fidelity", st.min_fidelity >= 1.0 - 1e-12, st.min_fidelity, ">=", 1.0 - 1e-12);
    return r;
}

json scan_json(const CalibrationScan &scan) {
    return {{"reference_ratio", {scan.reference_ratio.real(), scan.reference_ratio.imag()}},
            {"max_relative_variation", scan.max_relative_variation},
            {"points", scan.points.size()}};
}

Report conformance(const ScenarioConfig &c) {
    Scenario s = label_scenario(c);
    Report r;
    r.results["amplitude"] = conformance_report(s);
    auto raw = symbolic_amplitude(s, false);
    auto collapsed = symbolic_amplitude(s, true);
    std::vector<int> w;
    for (const auto &t : collapsed.terms) {
        w.push_back(amplitude_weight(t));
    }
    auto frac = parasitic_fraction(collapsed);
    r.check("six_pairings", raw.terms.size() == 6, static_cast<double>(raw.terms.size()), "==", 6);
    r.check("collapsed_weights_2_2_4", w == std::vector<int>{2, 2, 4}, w == std::vector<int>{2, 2, 4}, "==", 1);
    r.check("parasitic_fraction_1_2", frac == Rational{1, 2}, static_cast<double>(frac.num) / frac.den, "==", 0.5);

    auto conv3 = default_conventions(3, c.conv.mass);
    auto pts = default_calibration_points();
    for (auto &p : pts) {
        p.t /= conv3.mass;
        for (auto &x : p.x) {
            x /= conv3.mass;
        }
    }
    auto matched = calibration_scan(pts, conv3, SignLayout::matched);
    auto printed = calibration_scan(pts, conv3, SignLayout::as_printed);
    r.results["closed_form_sign_layout"] = {{"matched", scan_json(matched)}, {"as_printed", scan_json(printed)}};
    r.check("matched_layout_constant_ratio", matched.max_relative_variation <= 1e-6, matched.max_relative_variation,
            "<=", 1e-6);
    return r;
}

int resolve_threads(const Flags &f, std::ostream &err) {
    if (f.threads) {
        return *f.threads;
    }
    if (const char *env = std::getenv("FIELDPORT_THREADS"); env && *env) {
        int v = 0;
        std::string_view sv(env);
        auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        if (ec != std::errc() || p != sv.data() + sv.size() || v < 1) {
            err << "fieldport: FIELDPORT_THREADS must be a positive integer, got \"" << env << "\"\n";
            return -1;
        }
        return v;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int execute(const std::string &name, const Flags &f, std::ostream &out, std::ostream &err) {
    int threads = resolve_threads(f, err);
    if (threads < 1) {
        return kInvalidConfig;
    }
    ScenarioConfig cfg = f.config.empty() ? default_config() : load_config(f.config);
    Report r;
    if (name == "propagator-scan") {
        r = propagator_scan(cfg, threads);
    } else if (name == "microcausality") {
        r = microcausality(cfg, threads);
    } else if (name == "decay-fit") {
        r = decay(cfg, threads);
    } else if (name == "povm-check") {
        r = povm_check(cfg, threads);
    } else if (name == "amplitude-scan") {
        r = amplitude_scan(cfg, f, threads);
    } else if (name == "nr-limit") {
        r = nr_limit(cfg, threads);
    } else if (name == "teleport-qudit") {
        r = teleport(cfg, f);
    } else {
        r = conformance(cfg);
    }

    bool pass = true;
    for (const auto &c : r.checks) {
        pass = pass && c["pass"].get<bool>();
    }
    std::filesystem::path dir = f.out.empty() ? cfg.output_dir : f.out;
    json artifacts = json::array();
    std::vector<std::pair<std::string, std::string>> files;
    for (auto &[file, content] : r.files) {
        std::string ext = std::filesystem::path(file).extension().string().substr(1);
        if (cfg.wants(ext)) {
            artifacts.push_back(file);
            files.emplace_back(file, std::move(content));
        }
    }
    if (cfg.wants("json")) {
        artifacts.push_back(name + ".json");
    }
    json summary = {{"subcommand", name},         {"config_hash", cfg.hash}, {"conventions", conventions_json(cfg.conv)},
                    {"checks", r.checks},          {"pass", pass},            {"results", r.results},
                    {"artifacts", artifacts}};
    std::string text = summary.dump(2) + "\n";
    if (cfg.wants("json")) {
        files.emplace_back(name + ".json", text);
    }
    for (const auto &[file, content] : files) {
        write_atomic(dir / file, content);
    }
    out << text;
    if (!pass) {
        err << "fieldport " << name << ": checks failed:";
        for (const auto &c : r.checks) {
            if (!c["pass"].get<bool>()) {
                err << ' ' << c["name"].get<std::string>();
            }
        }
        err << '\n';
        return kChecksFailed;
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Field-theoretic teleportation checks and scans", "fieldport"};
    app.require_subcommand(1, 1);
    Flags f;
    auto common = [&](CLI::App *sc) {
        sc->add_option("--config", f.config, "Scenario config (JSON, see schema/scenario.schema.json)");
        sc->add_option("--out", f.out, "Output directory (overrides output.dir)");
        sc->add_option("--threads", f.threads, "Worker cap (env FIELDPORT_THREADS)")->check(CLI::PositiveNumber);
    };
    const std::vector<std::pair<const char *, const char *>> subs{
        {"propagator-scan", "D+ by quadrature on a (t, x1) grid, checked against the closed form"},
        {"microcausality", "Commutator function at spacelike points"},
        {"decay-fit", "Exponential rate of D+ outside the light cone"},
        {"povm-check", "Completeness of the discretized measurement"},
        {"amplitude-scan", "Output amplitude and its three terms over (X, P, x)"},
        {"nr-limit", "Replacement-rule limit and lattice probability map"},
        {"teleport-qudit", "Finite-dimensional teleportation over random states"},
        {"conformance-report", "Printed amplitude against the Wick expansion"},
    };
    for (const auto &[name, desc] : subs) {
        auto *sc = app.add_subcommand(name, desc);
        common(sc);
        if (std::string(name) == "amplitude-scan") {
            sc->add_option("--P", f.P, "Single P value (overrides lattice.P)");
            sc->add_flag("--dual-route", f.dual_route, "Also evaluate every term by the position route");
        }
        if (std::string(name) == "teleport-qudit") {
            sc->add_option("--dim", f.dim, "Qudit dimension")->check(CLI::Range(2, 16));
            sc->add_option("--trials", f.trials, "Random input states")->check(CLI::PositiveNumber);
            sc->add_option("--seed", f.seed, "Seed (default: config seed)");
        }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidConfig;
    }
    std::string name = app.get_subcommands().front()->get_name();
    try {
        return execute(name, f, out, err);
    } catch (const ConfigError &e) {
        for (const auto &d : e.diagnostics) {
            err << e.source << ':' << d.line << ": " << (d.pointer.empty() ? "/" : d.pointer) << ": " << d.message
                << '\n';
        }
        if (e.diagnostics.empty()) {
            err << e.what() << '\n';
        }
        return kInvalidConfig;
    } catch (const InvalidArgument &e) {
        err << "fieldport " << name << ": invalid input: " << e.what() << '\n';
        return kInvalidConfig;
    } catch (const LightConeGuard &e) {
        err << "fieldport " << name << ": numerical failure [propagator]: " << e.what()
            << " (distance to cone " << e.distance_to_cone << ")\n";
        return kNumericalFailure;
    } catch (const ConvergenceFailure &e) {
        err << "fieldport " << name << ": numerical failure [numerics]: " << e.what() << " (estimate "
            << e.best_estimate_abs << ", error " << e.est_error << ")\n";
        return kNumericalFailure;
    } catch (const CoverageError &e) {
        err << "fieldport " << name << ": numerical failure [amplitude]: " << e.what() << " (boundary ratio "
            << e.boundary_ratio << ")\n";
        return kNumericalFailure;
    } catch (const std::exception &e) {
        err << "fieldport " << name << ": failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace fieldport::cli
