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

#include "fieldport/nonrel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fieldport/error.hpp"
#include "fieldport/states.hpp"

namespace fieldport {

namespace {

using cdouble = std::complex<double>;
const cdouble kI(0.0, 1.0);

int wrap(int j, int n) {
    return ((j % n) + n) % n;
}

double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// Ring index per axis of a position; throws when off the ring.
std::vector<int> ring_index(const MomentumGrid &grid, const std::vector<double> &x) {
    if (static_cast<int>(x.size()) != grid.dims) {
        throw InvalidArgument("point dimension does not match the lattice");
    }
    const double h = grid.dual_spacing();
    const int half = (grid.n_points - 1) / 2;
    std::vector<int> idx(grid.dims);
    for (int d = 0; d < grid.dims; ++d) {
        double s = x[d] / h;
        long r = std::lround(s);
        if (!std::isfinite(s) || std::abs(s - static_cast<double>(r)) > 1e-9) {
            throw InvalidArgument("point is not on the position lattice");
        }
        idx[d] = wrap(static_cast<int>(r) + half, grid.n_points);
    }
    return idx;
}

std::vector<int> momentum_steps(const MomentumGrid &grid, const std::vector<double> &p) {
    if (static_cast<int>(p.size()) != grid.dims) {
        throw InvalidArgument("momentum dimension does not match the lattice");
    }
    std::vector<int> s(grid.dims);
    for (int d = 0; d < grid.dims; ++d) {
        double v = p[d] / grid.spacing;
        s[d] = static_cast<int>(std::lround(v));
        if (std::abs(v - s[d]) > 1e-9) {
            throw InvalidArgument("momentum is not on the lattice");
        }
    }
    return s;
}

// exp(i P.y) for y given by ring offsets; periodic in the ring index.
cdouble lattice_phase(const std::vector<int> &p, const std::vector<int> &y, int n) {
    long acc = 0;
    for (size_t d = 0; d < p.size(); ++d) {
        acc += static_cast<long>(p[d]) * y[d];
    }
    long r = ((acc % n) + n) % n;
    return std::exp(kI * (2.0 * std::numbers::pi * static_cast<double>(r) / n));
}

std::vector<int> offsets(const MomentumGrid &grid, const std::vector<int> &idx) {
    const int half = (grid.n_points - 1) / 2;
    std::vector<int> o(idx.size());
    for (size_t d = 0; d < idx.size(); ++d) {
        o[d] = idx[d] - half;
    }
    return o;
}

}  // namespace

void QuditState::validate() const {
    if (dim < 2 || dim > 16) {
        throw InvalidArgument("qudit dimension must lie in [2, 16]");
    }
    if (vector.size() != dim) {
        throw InvalidArgument("qudit vector length does not match dim");
    }
    if (std::abs(vector.norm() - 1.0) > 1e-12) {
        throw InvalidArgument("qudit state is not normalized");
    }
}

QuditState random_qudit(int dim, std::uint64_t seed) {
    if (dim < 2 || dim > 16) {
        throw InvalidArgument("qudit dimension must lie in [2, 16]");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    QuditState s;
    s.dim = dim;
    s.vector.resize(dim);
    for (int j = 0; j < dim; ++j) {
        double re = g(rng);
        double im = g(rng);
        s.vector[j] = cdouble(re, im);
    }
    s.vector.normalize();
    return s;
}

std::vector<BellOutcome> teleport_qudit(const QuditState &psi) {
    psi.validate();
    const int d = psi.dim;
    const double pi = std::numbers::pi;
    auto omega = [&](long e) { return std::exp(kI * (2.0 * pi * static_cast<double>(wrap(static_cast<int>(e % d), d)) / d)); };

    // Full state |s>|2>|1>, index s + d*(i2 + d*i1).
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(d * d * d);
    for (int s = 0; s < d; ++s) {
        for (int j = 0; j < d; ++j) {
            full[s + d * (j + d * j)] = psi.vector[s] / std::sqrt(static_cast<double>(d));
        }
    }
    std::vector<BellOutcome> out;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            // <B_ab| on (s, 2) applied to the full state.
            Eigen::VectorXcd post = Eigen::VectorXcd::Zero(d);
            for (int i1 = 0; i1 < d; ++i1) {
                cdouble acc = 0.0;
                for (int j = 0; j < d; ++j) {
                    int i2 = wrap(j + b, d);
                    acc += std::conj(omega(static_cast<long>(a) * j)) * full[j + d * (i2 + d * i1)];
                }
                post[i1] = acc / std::sqrt(static_cast<double>(d));
            }
            BellOutcome o;
            o.index = a * d + b;
            o.phase = a;
            o.shift = b;
            o.probability = post.squaredNorm();
            o.post_state = post / std::sqrt(o.probability);
            o.correction = Eigen::MatrixXcd::Zero(d, d);
            for (int j = 0; j < d; ++j) {
                o.correction(j, wrap(j + b, d)) = omega(static_cast<long>(a) * j);
            }
            Eigen::VectorXcd corrected = o.correction * o.post_state;
            o.fidelity = std::norm(psi.vector.dot(corrected));
            out.push_back(std::move(o));
        }
    }
    return out;
}

TeleportStats teleport_trials(int dim, int trials, std::uint64_t seed) {
    if (trials < 1) {
        throw InvalidArgument("trials must be positive");
    }
    TeleportStats st;
    st.dim = dim;
    st.trials = trials;
    st.mean_probability.assign(static_cast<size_t>(dim) * dim, 0.0);
    const double target = 1.0 / (static_cast<double>(dim) * dim);
    double fsum = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto res = teleport_qudit(random_qudit(dim, seed + static_cast<std::uint64_t>(t)));
        for (const auto &o : res) {
            st.mean_probability[o.index] += o.probability / trials;
            st.max_probability_deviation = std::max(st.max_probability_deviation, std::abs(o.probability - target));
            st.min_fidelity = std::min(st.min_fidelity, o.fidelity);
            fsum += o.fidelity;
        }
    }
    st.mean_fidelity = fsum / (static_cast<double>(trials) * dim * dim);
    return st;
}

NRPacket NRPacket::gaussian(const MomentumGrid &grid, std::vector<double> center, double width,
                            std::vector<double> k) {
    grid.validate();
    if (!(width > 0.0) || static_cast<int>(center.size()) != grid.dims || static_cast<int>(k.size()) != grid.dims) {
        throw InvalidArgument("bad NR packet parameters");
    }
    NRPacket f;
    f.grid = grid;
    for (size_t i = 0; i < grid.size(); ++i) {
        auto x = f.position(i);
        double r2 = 0.0;
        for (int d = 0; d < grid.dims; ++d) {
            r2 += (x[d] - center[d]) * (x[d] - center[d]);
        }
        f.values.push_back(std::exp(-r2 / (4.0 * width * width) + kI * dot(k, x)));
    }
    double s = 1.0 / std::sqrt(f.norm2());
    for (auto &v : f.values) {
        v *= s;
    }
    return f;
}

double NRPacket::norm2() const {
    double s = 0.0;
    for (const auto &v : values) {
        s += std::norm(v);
    }
    return s * grid.dual_cell_volume();
}

std::vector<double> NRPacket::position(size_t index) const {
    auto idx = grid.unflatten(index);
    std::vector<double> x(grid.dims);
    for (int d = 0; d < grid.dims; ++d) {
        x[d] = (idx[d] - (grid.n_points - 1) / 2) * grid.dual_spacing();
    }
    return x;
}

std::complex<double> NRPacket::at(const std::vector<double> &x) const {
    return values.at(grid.flatten(ring_index(grid, x)));
}

NRAmplitude nr_limit_expansion(const WickExpansion &exp) {
    int seen[4] = {0, 0, 0, 0};
    for (const auto &t : exp.terms) {
        seen[static_cast<int>(t.tag)] += t.multiplicity;
    }
    if (exp.terms.size() != 3 || seen[1] != 2 || seen[2] != 2 || seen[3] != 2) {
        throw InvalidArgument("nr_limit_expansion expects the collapsed ideal-pair expansion");
    }
    NRAmplitude a;
    a.terms.push_back({TermTag::teleport_direct, 2, true, 0, "2 f(x) exp(i P x) delta(x - x' + X)"});
    a.terms.push_back({TermTag::teleport_exchange, 2, true, 1, "2 f(x) exp(i P (x + X)) delta(x - x' + X)"});
    a.terms.push_back({TermTag::parasitic, 4, false, 0, "4 f(x) delta(X) delta(P)"});
    return a;
}

std::complex<double> nr_teleport_amplitude(const NRPacket &f, const Outcome &outcome, const std::vector<double> &x) {
    const auto &g = f.grid;
    auto xi = ring_index(g, x);
    auto Xi = ring_index(g, outcome.X);
    auto p = momentum_steps(g, outcome.P);
    const int half = (g.n_points - 1) / 2;
    std::vector<int> src(g.dims), y(g.dims);
    for (int d = 0; d < g.dims; ++d) {
        src[d] = wrap(xi[d] - (Xi[d] - half), g.n_points);
        y[d] = src[d] - half;
    }
    return f.values[g.flatten(src)] * lattice_phase(p, y, g.n_points);
}

std::complex<double> nr_term_value(const NRTerm &term, const NRPacket &f, const Outcome &outcome,
                                   const std::vector<double> &x) {
    const auto &g = f.grid;
    auto xi = ring_index(g, x);
    auto Xi = ring_index(g, outcome.X);
    auto p = momentum_steps(g, outcome.P);
    const int n = g.n_points;
    const int half = (n - 1) / 2;
    const double cell = g.dual_cell_volume();
    if (!term.displaced) {
        bool zero = true;
        for (int d = 0; d < g.dims; ++d) {
            zero = zero && Xi[d] == half && p[d] == 0;
        }
        if (!zero) {
            return 0.0;
        }
        return f.values[g.flatten(xi)] / (cell * g.cell_volume());
    }
    cdouble acc = 0.0;
    for (size_t j = 0; j < g.size(); ++j) {
        auto src = g.unflatten(j);
        bool hit = true;
        for (int d = 0; d < g.dims; ++d) {
            hit = hit && wrap(xi[d] - src[d] - (Xi[d] - half), n) == 0;
        }
        if (!hit) {
            continue;
        }
        auto y = offsets(g, src);
        auto Xo = offsets(g, Xi);
        cdouble ph = lattice_phase(p, y, n);
        if (term.extra_phase_X != 0) {
            std::vector<int> xs(Xo.size());
            for (size_t d = 0; d < Xo.size(); ++d) {
                xs[d] = term.extra_phase_X * Xo[d];
            }
            ph *= lattice_phase(p, xs, n);
        }
        acc += cell * f.values[j] * ph * (1.0 / cell);
    }
    return acc;
}

std::complex<double> nr_total_amplitude(const NRAmplitude &amp, const NRPacket &f, const Outcome &outcome,
                                        const std::vector<double> &x, const std::vector<bool> &include) {
    cdouble s = 0.0;
    for (size_t i = 0; i < amp.terms.size(); ++i) {
        if (!include.empty() && !include.at(i)) {
            continue;
        }
        s += static_cast<double>(amp.terms[i].weight) * nr_term_value(amp.terms[i], f, outcome, x);
    }
    return s;
}

std::vector<double> nr_outcome_probability(const NRPacket &f) {
    const auto &g = f.grid;
    std::vector<double> out;
    out.reserve(g.outcome_count());
    for (size_t o = 0; o < g.outcome_count(); ++o) {
        Outcome oc = g.outcome(o);
        double s = 0.0;
        for (size_t i = 0; i < g.size(); ++i) {
            s += std::norm(nr_teleport_amplitude(f, oc, f.position(i)));
        }
        out.push_back(s * g.dual_cell_volume() * g.outcome_weight());
    }
    return out;
}

std::complex<double> nr_epr_overlap(const std::vector<double> &q, const Outcome &outcome, const MomentumGrid &grid) {
    momentum_steps(grid, q);
    EPRFamily pair{0.0, q, 0.0, 1.0};
    return epr_overlap_with_povm_state(pair, outcome, grid, default_conventions(grid.dims), 0.0);
}

}  // namespace fieldport
