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

#include "fieldport/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>

#include "fieldport/error.hpp"
#include "fieldport/numerics.hpp"
#include "fieldport/propagator.hpp"

namespace fieldport {

namespace {

using numerics::QuadratureOptions;
using numerics::QuadratureResult;

const cdouble kI(0.0, 1.0);
constexpr double kPi = std::numbers::pi;

// Distance (in Compton lengths) beyond the light cone after which D+ is
// dropped, and Gaussian cut radii in units of the width.
constexpr double kConeTail = 20.0;
constexpr double kGaussCut = 7.0;
constexpr double kMomentumCut = 12.0;

QuadratureResult integrate(const numerics::RealIntegrand &f, double lo, double hi, std::vector<double> breaks,
                           double rel_tol, double abs_tol = 1e-16) {
    if (!(lo < hi)) {
        return {};
    }
    std::vector<double> inside;
    std::sort(breaks.begin(), breaks.end());
    for (double b : breaks) {
        if (b > lo && b < hi && (inside.empty() || b - inside.back() > 1e-12)) {
            inside.push_back(b);
        }
    }
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    return numerics::integrate_adaptive(f, lo, hi, opts, inside);
}

// Same, for integrands with integrable (logarithmic) singularities at the
// breakpoints: every segment is mapped by x = a + (b - a)(3s^2 - 2s^3), whose
// Jacobian vanishes at both ends.
QuadratureResult integrate_singular(const numerics::RealIntegrand &f, double lo, double hi, std::vector<double> breaks,
                                    double rel_tol) {
    if (!(lo < hi)) {
        return {};
    }
    std::vector<double> cuts{lo};
    std::sort(breaks.begin(), breaks.end());
    for (double b : breaks) {
        if (b > lo && b < hi && b - cuts.back() > 1e-12) {
            cuts.push_back(b);
        }
    }
    if (hi - cuts.back() > 1e-12) {
        cuts.push_back(hi);
    } else {
        cuts.back() = hi;
    }
    QuadratureOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = 1e-16;
    QuadratureResult total;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], w = cuts[i + 1] - a;
        auto g = [&](double s) { return f(a + w * s * s * (3.0 - 2.0 * s)) * (6.0 * w * s * (1.0 - s)); };
        auto r = numerics::integrate_adaptive(g, 0.0, 1.0, opts);
        total.value += r.value;
        total.est_error += r.est_error;
        total.panels_used += r.panels_used;
    }
    return total;
}

cdouble pair_weight(const EPRFamily &e, double K) {
    double d = K - e.q_total[0];
    return e.amplitude * std::exp(-d * d / (4.0 * e.sigma_epr * e.sigma_epr));
}

// Position profile of the regularized pair.
cdouble pair_profile(const EPRFamily &e, double x) {
    double s = e.sigma_epr;
    return e.amplitude / (2.0 * kPi) * 2.0 * s * std::sqrt(kPi) * std::exp(-s * s * x * x) *
           std::exp(-kI * e.q_total[0] * x);
}

TermTag require_tag(const PairingTerm &term) {
    if (term.tag == TermTag::untagged) {
        throw InvalidArgument("term is not tagged; classify the expansion first");
    }
    return term.tag;
}

double single(const std::vector<double> &v, const char *what) {
    if (v.size() != 1) {
        throw InvalidArgument(std::string(what) + " must be one-dimensional");
    }
    return v[0];
}

// ---- position route ----

struct PositionRoute {
    const Scenario &s;
    double m, L, xc, Rf, Rw;

    explicit PositionRoute(const Scenario &sc)
        : s(sc),
          m(sc.conv.mass),
          L(kConeTail / sc.conv.mass),
          xc(sc.packet.x_center[0]),
          Rf(kGaussCut / sc.packet.sigma_k),
          Rw(kGaussCut / sc.epr.sigma_epr) {
    }

    cdouble D(double t, double y) const {
        return dplus_1d_kernel(t, y, s.conv);
    }

    // int dx' f(x') D+(t0 - t, x' - a)
    cdouble packet_factor(double a, double t) const {
        double tau = s.packet.t0 - t;
        double lo = std::max(xc - Rf, a - std::abs(tau) - L);
        double hi = std::min(xc + Rf, a + std::abs(tau) + L);
        auto fn = [&](double xp) {
            double v[1] = {xp};
            return position_shape_at_reference(s.packet, v) * D(tau, xp - a);
        };
        return integrate_singular(fn, lo, hi, {a - tau, a + tau}, 1e-6).value;
    }

    // int dx1 w(x1) D+(t1 - xi0, x1 - a) D+(t1 - t_out, x1 - x)
    cdouble pair_factor(double a, double x) const {
        double t1 = s.epr.pair_time;
        double tau1 = t1 - s.xi0, tau2 = t1 - s.t_out;
        double lo = std::max({-Rw, a - std::abs(tau1) - L, x - std::abs(tau2) - L});
        double hi = std::min({Rw, a + std::abs(tau1) + L, x + std::abs(tau2) + L});
        auto fn = [&](double x1) { return pair_profile(s.epr, x1) * D(tau1, x1 - a) * D(tau2, x1 - x); };
        return integrate_singular(fn, lo, hi, {a - tau1, a + tau1, x - tau2, x + tau2}, 1e-6).value;
    }

    TermValue teleport(bool exchange, double X, double P, double x) const {
        double tau0 = std::abs(s.packet.t0 - s.xi0);
        double tau1 = std::abs(s.epr.pair_time - s.xi0), tau2 = std::abs(s.epr.pair_time - s.t_out);
        // direct: packet meets xi, the pair meets xi - X and x
        // exchange: packet meets xi - X, the pair meets xi and x
        double packet_shift = exchange ? X : 0.0;
        double pair_shift = exchange ? 0.0 : X;
        double span_f = Rf + tau0 + L;
        double span_w = tau1 + tau2 + 2.0 * L;
        double lo = std::max(xc + packet_shift - span_f, x + pair_shift - span_w);
        double hi = std::min(xc + packet_shift + span_f, x + pair_shift + span_w);
        std::vector<double> breaks;
        for (double a : {-1.0, 1.0}) {
            for (double b : {-1.0, 1.0}) {
                breaks.push_back(x + pair_shift + a * tau1 + b * tau2);
            }
        }
        auto fn = [&](double xi) {
            return std::exp(kI * P * xi) * packet_factor(xi - packet_shift, s.xi0) * pair_factor(xi - pair_shift, x);
        };
        auto r = integrate(fn, lo, hi, breaks, 1e-5);
        return {r.value, r.est_error};
    }

    TermValue parasitic(double X, double P, double x) const {
        double tau1 = s.epr.pair_time - s.xi0;
        cdouble a1 = packet_factor(x, s.t_out);
        auto wfn = [&](double x1) { return pair_profile(s.epr, x1) * std::exp(kI * P * x1); };
        cdouble w = integrate(wfn, -Rw, Rw, {0.0}, 1e-11).value;
        double at = std::abs(tau1);
        double lo = std::max(-at - L, -X - at - L);
        double hi = std::min(at + L, -X + at + L);
        auto ufn = [&](double u) { return std::exp(-kI * P * u) * D(tau1, u) * D(tau1, u + X); };
        auto r = integrate_singular(ufn, lo, hi, {-tau1, tau1, -X - tau1, -X + tau1}, 1e-9);
        return {a1 * w * r.value, std::abs(a1 * w) * r.est_error};
    }
};

// ---- momentum route ----

struct MomentumRoute {
    const Scenario &s;
    double C;
    cdouble prefactor;

    explicit MomentumRoute(const Scenario &sc) : s(sc), C(1.0 / (2.0 * kPi)) {
        // three factors -i C and the (2 pi) of the xi integral
        prefactor = std::pow(-kI * C, 3) * (2.0 * kPi);
    }

    double k0(double k) const {
        return s.conv.energy(k * k);
    }
    cdouble packet_amp(double k) const {
        double v[1] = {-k};
        return s.packet(v);
    }

    TermValue teleport(bool exchange, double X, double P, double x) const {
        const double t0 = s.packet.t0, t1 = s.epr.pair_time;
        const double sk = s.packet.sigma_k, se = s.epr.sigma_epr;
        const double kc = s.packet.k_center[0], q = s.epr.q_total[0];
        // absolute floors: 1e-13 of the integrand scale
        const double floor_g = 1e-13 * std::abs(s.epr.amplitude) * se / s.conv.mass;
        const double floor_f = std::abs(s.packet.norm) * sk / s.conv.mass;
        auto inner = [&](double k1) {
            double k2 = P - k1;
            double e1 = k0(k1), e2 = k0(k2);
            cdouble head = packet_amp(k1) * std::exp(-kI * (e1 * (t0 - s.xi0) + e2 * (t1 - s.xi0))) *
                           std::exp(kI * (exchange ? k1 : k2) * X) / (4.0 * e1 * e2);
            auto fn = [&](double k3) {
                double e3 = k0(k3);
                return pair_weight(s.epr, k2 + k3) * std::exp(-kI * (k3 * x + e3 * (t1 - s.t_out))) / (2.0 * e3);
            };
            double c3 = q - k2;
            return head * integrate(fn, c3 - kMomentumCut * se, c3 + kMomentumCut * se, {c3}, 1e-11, floor_g).value;
        };
        auto r = integrate(inner, -kc - kMomentumCut * sk, -kc + kMomentumCut * sk, {-kc}, 1e-10, floor_f * floor_g);
        return {prefactor * r.value, std::abs(prefactor) * r.est_error};
    }

    TermValue parasitic(double X, double P, double x) const {
        const double t0 = s.packet.t0, t1 = s.epr.pair_time;
        const double sk = s.packet.sigma_k, kc = s.packet.k_center[0];
        auto afn = [&](double k1) {
            double e1 = k0(k1);
            return packet_amp(k1) * std::exp(-kI * (k1 * x + e1 * (t0 - s.t_out))) / (2.0 * e1);
        };
        auto a1 = integrate(afn, -kc - kMomentumCut * sk, -kc + kMomentumCut * sk, {-kc}, 1e-11,
                            1e-12 * std::abs(s.packet.norm) * sk / s.conv.mass);
        // int dk2 exp(i k3 X - i (k2^0 + k3^0)(t1 - xi0)) / (4 k2^0 k3^0), k3 = P - k2
        const double delta = s.xi0 - t1;
        const double mid = 0.5 * P;
        auto piece = [&](double sign) {
            auto fn = [&, sign](double u) {
                double k2 = mid + sign * u, k3 = P - k2;
                double e2 = k0(k2), e3 = k0(k3);
                return std::exp(kI * (k3 * X + (e2 + e3) * delta)) / (4.0 * e2 * e3);
            };
            double rate = std::abs(2.0 * delta + sign * -X);
            QuadratureOptions opts;
            opts.rel_tol = 1e-10;
            opts.abs_tol = 1e-14;
            return numerics::integrate_oscillatory(fn, 0.0, rate, opts);
        };
        auto right = piece(1.0), left = piece(-1.0);
        cdouble a2 = right.value + left.value;
        cdouble v = prefactor * pair_weight(s.epr, P) * a1.value * a2;
        double err = std::abs(prefactor * pair_weight(s.epr, P)) *
                     (std::abs(a1.value) * (right.est_error + left.est_error) + std::abs(a2) * a1.est_error);
        return {v, err};
    }
};

std::string rational_string(const Rational &r) {
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

}  // namespace

void Scenario::validate() const {
    fieldport::validate(conv);
    if (conv.spatial_dims != 1) {
        throw InvalidArgument("the amplitude module supports 1+1 dimensions only");
    }
    packet.validate(1);
    epr.validate(1);
    if (!(epr.sigma_epr > 0.0)) {
        throw InvalidArgument("amplitude runs need a regularized pair (sigma_epr > 0)");
    }
    if (!std::isfinite(xi0) || !std::isfinite(t_out) || !std::isfinite(packet.t0)) {
        throw InvalidArgument("scenario times must be finite");
    }
}

AmplitudeLabels amplitude_labels(const Scenario &s) {
    AmplitudeLabels l;
    l.xi = PointLabel{"xi", std::nullopt, s.xi0};
    l.xi_shift = PointLabel{"xi", std::vector<double>{-1.0}, s.xi0};
    l.out = PointLabel{"x", std::nullopt, s.t_out};
    l.x1 = PointLabel{"x1", std::nullopt, s.epr.pair_time};
    l.x2 = PointLabel{"x2", std::nullopt, s.epr.pair_time};
    l.packet = PointLabel{"x'", std::nullopt, s.packet.t0};
    return l;
}

WickExpansion symbolic_amplitude(const Scenario &s, bool ideal_pair) {
    auto l = amplitude_labels(s);
    OperatorWord w;
    w.annihilate(l.xi).annihilate(l.xi_shift).annihilate(l.out).create(l.x1).create(l.x2).create(l.packet);
    auto exp = classify_terms(vacuum_expectation_symbolic(w), Roles{l.packet, {l.x1, l.x2}, l.out, {l.xi, l.xi_shift}});
    if (!ideal_pair) {
        return exp;
    }
    auto collapsed = collapse_repeated_labels(exp, {{l.x2, l.x1}});
    std::stable_sort(collapsed.terms.begin(), collapsed.terms.end(),
                     [](const PairingTerm &a, const PairingTerm &b) { return a.tag < b.tag; });
    return collapsed;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw InvalidArgument("zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    std::int64_t g = std::gcd(num, den);
    if (g == 0) {
        g = 1;
    }
    return {num / g, den / g};
}

int amplitude_weight(const PairingTerm &term) {
    return term.tag == TermTag::parasitic ? 2 * term.multiplicity : term.multiplicity;
}

Rational parasitic_fraction(const WickExpansion &exp, bool printed_weights) {
    std::int64_t par = 0, total = 0;
    for (const auto &t : exp.terms) {
        std::int64_t w = printed_weights ? amplitude_weight(t) : t.multiplicity;
        total += w;
        if (t.tag == TermTag::parasitic) {
            par += w;
        }
    }
    return make_rational(par, total);
}

TermValue term_value_position(const PairingTerm &term, const Scenario &s, const Outcome &outcome, double x) {
    s.validate();
    TermTag tag = require_tag(term);
    double X = single(outcome.X, "outcome X"), P = single(outcome.P, "outcome P");
    PositionRoute r(s);
    if (tag == TermTag::parasitic) {
        return r.parasitic(X, P, x);
    }
    return r.teleport(tag == TermTag::teleport_exchange, X, P, x);
}

TermValue term_value_momentum(const PairingTerm &term, const Scenario &s, const Outcome &outcome, double x) {
    s.validate();
    TermTag tag = require_tag(term);
    double X = single(outcome.X, "outcome X"), P = single(outcome.P, "outcome P");
    MomentumRoute r(s);
    if (tag == TermTag::parasitic) {
        return r.parasitic(X, P, x);
    }
    return r.teleport(tag == TermTag::teleport_exchange, X, P, x);
}

AmplitudeBreakdown total_amplitude(const Scenario &s, const Outcome &outcome, double x, const AmplitudeOptions &opts) {
    auto exp = symbolic_amplitude(s, true);
    AmplitudeBreakdown b;
    for (const auto &t : exp.terms) {
        BreakdownTerm bt;
        bt.tag = t.tag;
        bt.weight = amplitude_weight(t);
        bool on = (t.tag == TermTag::teleport_direct && opts.include_direct) ||
                  (t.tag == TermTag::teleport_exchange && opts.include_exchange) ||
                  (t.tag == TermTag::parasitic && opts.include_parasitic);
        if (on) {
            try {
                auto v = term_value_momentum(t, s, outcome, x);
                bt.value = v.value;
                bt.est_error = v.est_error;
            } catch (const ConvergenceFailure &) {
                b.partial = true;
                bt.est_error = std::numeric_limits<double>::infinity();
            }
        }
        b.total += static_cast<double>(bt.weight) * bt.value;
        b.est_error += bt.weight * bt.est_error;
        b.terms.push_back(bt);
    }
    return b;
}

double outcome_probability_density(const Scenario &s, const Outcome &outcome, const std::vector<double> &x_grid,
                                   double outcome_cell, const AmplitudeOptions &opts) {
    if (x_grid.size() < 3) {
        throw InvalidArgument("x grid needs at least three points");
    }
    const double dx = x_grid[1] - x_grid[0];
    for (size_t i = 1; i < x_grid.size(); ++i) {
        if (!(dx > 0.0) || std::abs(x_grid[i] - x_grid[i - 1] - dx) > 1e-9 * dx) {
            throw InvalidArgument("x grid must be uniform and increasing");
        }
    }
    std::vector<double> dens;
    dens.reserve(x_grid.size());
    for (double x : x_grid) {
        dens.push_back(std::norm(total_amplitude(s, outcome, x, opts).total));
    }
    double peak = *std::max_element(dens.begin(), dens.end());
    double edge = std::max(dens.front(), dens.back());
    if (peak > 0.0 && edge > 1e-6 * peak) {
        throw CoverageError("x grid does not cover the amplitude support: boundary density is " +
                                std::to_string(edge / peak) + " of the peak",
                            edge / peak);
    }
    numerics::CompensatedSum<double> sum;
    for (double d : dens) {
        sum.add(d);
    }
    return sum.value() * dx * outcome_cell;
}

nlohmann::json conformance_report(const Scenario &s) {
    auto l = amplitude_labels(s);
    auto exp = symbolic_amplitude(s, true);
    struct Factor {
        const char *printed;
        PointLabel left, right;
    };
    struct Printed {
        const char *name;
        int weight;
        std::vector<Factor> factors;
    };
    std::vector<Printed> printed = {
        {"T1", 2, {{"D+(x1 - x')", l.x1, l.packet}, {"D+(x - xi)", l.out, l.xi}, {"D+(x1 - xi + X)", l.x1, l.xi_shift}}},
        {"T2", 2, {{"D+(x1 - x')", l.x1, l.packet}, {"D+(x1 - xi)", l.x1, l.xi}, {"D+(x - xi + X)", l.out, l.xi_shift}}},
        {"P", 4, {{"D+(x - x')", l.out, l.packet}, {"D+(x1 - xi)", l.x1, l.xi}, {"D+(x1 - xi + X)", l.x1, l.xi_shift}}},
    };
    auto is_creator = [&](const PointLabel &p) { return p == l.x1 || p == l.packet; };
    nlohmann::json terms = nlohmann::json::array();
    bool all_ok = true;
    for (const auto &pt : printed) {
        nlohmann::json jt;
        jt["printed_term"] = pt.name;
        jt["printed_weight"] = pt.weight;
        nlohmann::json factors = nlohmann::json::array();
        std::vector<Contraction> as_pairs;
        for (const auto &f : pt.factors) {
            std::string status;
            bool lc = is_creator(f.left), rc = is_creator(f.right);
            if (lc && !rc) {
                status = "creator_minus_annihilator";
                as_pairs.push_back({f.left, f.right});
            } else if (!lc && rc) {
                status = "reflected";
                as_pairs.push_back({f.right, f.left});
            } else {
                status = lc ? "creator_creator" : "annihilator_annihilator";
                all_ok = false;
            }
            if (status == "reflected") {
                all_ok = false;
            }
            factors.push_back({{"factor", f.printed}, {"status", status}});
        }
        jt["factors"] = factors;
        // derived term sharing the most contractions
        int best = -1;
        size_t best_shared = 0;
        for (size_t i = 0; i < exp.terms.size(); ++i) {
            size_t shared = 0;
            for (const auto &c : as_pairs) {
                shared += std::count(exp.terms[i].pairs.begin(), exp.terms[i].pairs.end(), c);
            }
            if (shared > best_shared) {
                best_shared = shared;
                best = static_cast<int>(i);
            }
        }
        jt["closest_derived_tag"] = best >= 0 ? to_string(exp.terms[best].tag) : "none";
        jt["shared_contractions"] = best_shared;
        jt["exact_match"] = best_shared == 3;
        terms.push_back(jt);
    }
    nlohmann::json report;
    report["printed_terms"] = terms;
    report["derived"] = to_json(exp);
    nlohmann::json weights = nlohmann::json::object();
    for (const auto &t : exp.terms) {
        weights[to_string(t.tag)] = {{"wick_multiplicity", t.multiplicity}, {"amplitude_weight", amplitude_weight(t)}};
    }
    report["weights"] = weights;
    report["parasitic_fraction_weighted"] = rational_string(parasitic_fraction(exp, true));
    report["parasitic_fraction_wick"] = rational_string(parasitic_fraction(exp, false));
    report["printed_orders_consistent"] = all_ok;
    return report;
}

}  // namespace fieldport
