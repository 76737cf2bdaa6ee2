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

#include "fieldport/measurement.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include <Eigen/Eigenvalues>

#include "fieldport/error.hpp"
#include "fieldport/numerics.hpp"

namespace fieldport {

namespace {

using cdouble = std::complex<double>;
const cdouble kI(0.0, 1.0);

double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

std::vector<int> lattice_steps(const std::vector<double> &v, double spacing, const char *what) {
    std::vector<int> steps(v.size());
    for (size_t d = 0; d < v.size(); ++d) {
        double s = v[d] / spacing;
        steps[d] = static_cast<int>(std::lround(s));
        if (!std::isfinite(s) || std::abs(s - steps[d]) > 1e-9) {
            throw InvalidArgument(std::string(what) + " is not on its lattice");
        }
    }
    return steps;
}

void check_outcome(const Outcome &o, const MomentumGrid &grid) {
    if (static_cast<int>(o.X.size()) != grid.dims || static_cast<int>(o.P.size()) != grid.dims) {
        throw InvalidArgument("outcome dimension does not match the grid");
    }
}

// Flat index of k + P (P in lattice steps), or -1 when it leaves the grid.
long shifted_index(const MomentumGrid &grid, size_t i, const std::vector<int> &p) {
    auto idx = grid.unflatten(i);
    for (int d = 0; d < grid.dims; ++d) {
        idx[d] += p[d];
        if (idx[d] < 0 || idx[d] >= grid.n_points) {
            return -1;
        }
    }
    return static_cast<long>(grid.flatten(idx));
}

struct PointData {
    std::vector<std::vector<double>> k;
    std::vector<double> energy;
    std::vector<double> mu;
};

PointData point_data(const MomentumGrid &grid, const Conventions *conv) {
    PointData pd;
    for (size_t i = 0; i < grid.size(); ++i) {
        pd.k.push_back(grid.point(i));
        if (conv) {
            pd.energy.push_back(conv->energy(dot(pd.k.back(), pd.k.back())));
            pd.mu.push_back(cell_measure(pd.k.back(), grid.spacing, *conv));
        }
    }
    return pd;
}

cdouble coefficient(PovmFamily family, const PointData &pd, size_t i, size_t j, const Outcome &o, double xi0,
                    double cell) {
    cdouble phase = std::exp(kI * dot(pd.k[i], o.X));
    if (family == PovmFamily::nonrelativistic) {
        return phase;
    }
    double ei = pd.energy[i], ej = pd.energy[j];
    double amp = cell / std::sqrt(2.0 * ei * 2.0 * ej * pd.mu[i] * pd.mu[j]);
    return amp * phase * std::exp(-kI * (ei + ej) * xi0);
}

DiscretizedOperator build(PovmFamily family, const Outcome &outcome, const MomentumGrid &grid, double xi0,
                          const Conventions *conv, bool spectator) {
    grid.validate();
    check_outcome(outcome, grid);
    auto p = lattice_steps(outcome.P, grid.spacing, "outcome P");
    PointData pd = point_data(grid, conv);
    const size_t N = grid.size();
    DiscretizedOperator op;
    op.grid = grid;
    op.spectator = spectator;
    op.measure = family == PovmFamily::nonrelativistic ? MeasureKind::flat : MeasureKind::mass_shell;
    op.weight = grid.outcome_weight();
    op.vector = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N * N));
    double cell = grid.cell_volume();
    for (size_t i = 0; i < N; ++i) {
        op.measure_weights.push_back(family == PovmFamily::nonrelativistic ? cell : cell / (2.0 * pd.energy[i]));
        long j = shifted_index(grid, i, p);
        if (j < 0) {
            continue;
        }
        op.vector[static_cast<Eigen::Index>(i + N * j)] = coefficient(family, pd, i, j, outcome, xi0, cell);
    }
    return op;
}

}  // namespace

Eigen::Index DiscretizedOperator::dimension() const {
    Eigen::Index n2 = vector.size();
    return spectator ? n2 * static_cast<Eigen::Index>(grid.size()) : n2;
}

Eigen::MatrixXcd DiscretizedOperator::matrix() const {
    Eigen::MatrixXcd m = weight * vector * vector.adjoint();
    if (!spectator) {
        return m;
    }
    Eigen::Index n2 = m.rows();
    Eigen::Index copies = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(n2 * copies, n2 * copies);
    for (Eigen::Index c = 0; c < copies; ++c) {
        full.block(c * n2, c * n2, n2, n2) = m;
    }
    return full;
}

std::complex<double> phi_kernel(const Outcome &outcome, const std::vector<double> &xi1, double t1,
                                const std::vector<double> &xi2, double t2, const MomentumGrid &grid) {
    grid.validate();
    check_outcome(outcome, grid);
    if (t1 != t2) {
        throw InvalidArgument("phi_kernel: both points must lie on the same time slice");
    }
    if (static_cast<int>(xi1.size()) != grid.dims || static_cast<int>(xi2.size()) != grid.dims) {
        throw InvalidArgument("phi_kernel: point dimension does not match the grid");
    }
    double dx = grid.dual_spacing();
    auto a = lattice_steps(xi1, dx, "xi1");
    auto b = lattice_steps(xi2, dx, "xi2");
    auto x = lattice_steps(outcome.X, dx, "outcome X");
    lattice_steps(outcome.P, grid.spacing, "outcome P");
    const int n = grid.n_points;
    for (int d = 0; d < grid.dims; ++d) {
        int r = ((a[d] - b[d] - x[d]) % n + n) % n;
        if (r != 0) {
            return 0.0;
        }
    }
    return std::exp(kI * dot(outcome.P, xi1)) / grid.dual_cell_volume();
}

double phi_completeness_defect(const MomentumGrid &grid) {
    grid.validate();
    if (grid.dims != 1) {
        throw InvalidArgument("phi_completeness_defect is implemented for 1D grids");
    }
    const int n = grid.n_points;
    const int h = (n - 1) / 2;
    const double dx = grid.dual_spacing();
    const double cell2 = dx * dx;
    std::vector<double> ring(n);
    for (int j = 0; j < n; ++j) {
        ring[j] = (j - h) * dx;
    }
    std::vector<Outcome> outcomes;
    for (size_t o = 0; o < grid.outcome_count(); ++o) {
        outcomes.push_back(grid.outcome(o));
    }
    const double w = grid.outcome_weight();
    double worst = 0.0;
    std::vector<cdouble> phi(outcomes.size());
    for (int a1 = 0; a1 < n; ++a1) {
        for (int a2 = 0; a2 < n; ++a2) {
            for (size_t o = 0; o < outcomes.size(); ++o) {
                phi[o] = phi_kernel(outcomes[o], {ring[a1]}, 0.0, {ring[a2]}, 0.0, grid);
            }
            for (int b1 = 0; b1 < n; ++b1) {
                for (int b2 = 0; b2 < n; ++b2) {
                    numerics::CompensatedSum<cdouble> s;
                    for (size_t o = 0; o < outcomes.size(); ++o) {
                        if (phi[o] == 0.0) {
                            continue;
                        }
                        s.add(w * phi[o] *
                              std::conj(phi_kernel(outcomes[o], {ring[b1]}, 0.0, {ring[b2]}, 0.0, grid)));
                    }
                    double target = (a1 == b1 && a2 == b2) ? 1.0 : 0.0;
                    worst = std::max(worst, std::abs(s.value() * cell2 - target));
                }
            }
        }
    }
    return worst;
}

DiscretizedOperator build_povm_nr(const Outcome &outcome, const MomentumGrid &grid) {
    return build(PovmFamily::nonrelativistic, outcome, grid, 0.0, nullptr, false);
}

DiscretizedOperator build_povm_rel(const Outcome &outcome, const MomentumGrid &grid, double xi0,
                                   const Conventions &conv, bool spectator) {
    validate(conv);
    if (grid.dims != conv.spatial_dims) {
        throw InvalidArgument("grid and conventions disagree on spatial_dims");
    }
    return build(PovmFamily::relativistic, outcome, grid, xi0, &conv, spectator);
}

double cell_measure(const std::vector<double> &k, double spacing, const Conventions &conv) {
    const double m = conv.mass;
    if (k.size() == 1) {
        double lo = k[0] - 0.5 * spacing, hi = k[0] + 0.5 * spacing;
        return 0.5 * (std::asinh(hi / m) - std::asinh(lo / m));
    }
    static const numerics::GaussRule rule = numerics::gauss_legendre(12);
    double h = 0.5 * spacing;
    numerics::CompensatedSum<double> s;
    for (size_t a = 0; a < rule.nodes.size(); ++a) {
        for (size_t b = 0; b < rule.nodes.size(); ++b) {
            for (size_t c = 0; c < rule.nodes.size(); ++c) {
                double x = k[0] + h * rule.nodes[a], y = k[1] + h * rule.nodes[b], z = k[2] + h * rule.nodes[c];
                s.add(rule.weights[a] * rule.weights[b] * rule.weights[c] / (2.0 * conv.energy(x * x + y * y + z * z)));
            }
        }
    }
    return s.value() * h * h * h;
}

CompletenessReport completeness_defect(PovmFamily family, const MomentumGrid &grid, const Conventions &conv,
                                       const CompletenessOptions &opts) {
    grid.validate();
    validate(conv);
    if (family == PovmFamily::relativistic && grid.dims != conv.spatial_dims) {
        throw InvalidArgument("grid and conventions disagree on spatial_dims");
    }
    const size_t N = grid.size();
    PointData pd = point_data(grid, family == PovmFamily::relativistic ? &conv : nullptr);
    const double w = grid.outcome_weight();
    const double cell = grid.cell_volume();

    struct BlockResult {
        double defect = 0.0;
        double min_eig = 0.0;
        size_t size = 0;
    };
    std::vector<BlockResult> results(N);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t pb = next++; pb < N; pb = next++) {
            std::vector<int> p = grid.p_steps(pb * N);
            std::vector<size_t> members;
            std::vector<size_t> partner;
            for (size_t i = 0; i < N; ++i) {
                long j = shifted_index(grid, i, p);
                if (j >= 0) {
                    members.push_back(i);
                    partner.push_back(static_cast<size_t>(j));
                }
            }
            const Eigen::Index s = static_cast<Eigen::Index>(members.size());
            Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(s, s);
            Eigen::VectorXcd u(s);
            for (size_t xb = 0; xb < N; ++xb) {
                size_t o = xb + N * pb;
                if (opts.deleted_outcome && *opts.deleted_outcome == o) {
                    continue;
                }
                Outcome out = grid.outcome(o);
                for (Eigen::Index a = 0; a < s; ++a) {
                    u[a] = coefficient(family, pd, members[a], partner[a], out, opts.xi0, cell);
                }
                B.noalias() += w * u * u.adjoint();
            }
            BlockResult r;
            r.size = members.size();
            if (s > 0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B, Eigen::EigenvaluesOnly);
                const auto &ev = es.eigenvalues();
                r.defect = std::max(std::abs(ev.minCoeff() - 1.0), std::abs(ev.maxCoeff() - 1.0));
                r.min_eig = ev.minCoeff();
            }
            results[pb] = r;
        }
    };
    int threads = std::max(1, opts.threads);
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    CompletenessReport rep;
    rep.outcomes = grid.outcome_count() - (opts.deleted_outcome ? 1 : 0);
    rep.min_eigenvalue = 1.0;
    for (const auto &r : results) {
        rep.defect_interior = std::max(rep.defect_interior, r.defect);
        rep.interior_size += r.size;
        if (r.size > 0) {
            rep.min_eigenvalue = std::min(rep.min_eigenvalue, r.min_eig);
        }
    }
    rep.boundary_size = N * N - rep.interior_size;
    rep.defect_full = rep.boundary_size > 0 ? std::max(rep.defect_interior, 1.0) : rep.defect_interior;
    return rep;
}

}  // namespace fieldport
