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

#include "fieldport/states.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fieldport/error.hpp"
#include "fieldport/numerics.hpp"

namespace fieldport {

namespace {

constexpr double kPi = std::numbers::pi;
const cdouble kI(0.0, 1.0);

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(std::span<const double> a) {
    return dot(a, a);
}

void check_vector(std::span<const double> v, int dims, const char *what) {
    if (static_cast<int>(v.size()) != dims) {
        throw InvalidArgument(std::string(what) + " has the wrong number of components");
    }
    for (double c : v) {
        if (!std::isfinite(c)) {
            throw InvalidArgument(std::string(what) + " is not finite");
        }
    }
}

}  // namespace

void GaussianPacket::validate(int d) const {
    check_vector(k_center, d, "packet k_center");
    check_vector(x_center, d, "packet x_center");
    if (!(sigma_k > 0.0) || !std::isfinite(sigma_k)) {
        throw InvalidArgument("packet sigma_k must be positive (non-normalizable otherwise)");
    }
    if (!(norm > 0.0) || !std::isfinite(norm) || !std::isfinite(t0)) {
        throw InvalidArgument("packet norm and t0 must be finite, norm positive");
    }
}

cdouble GaussianPacket::operator()(std::span<const double> k) const {
    double d2 = 0.0;
    for (size_t i = 0; i < k.size(); ++i) {
        double d = k[i] - k_center[i];
        d2 += d * d;
    }
    return norm * std::exp(-d2 / (4.0 * sigma_k * sigma_k)) * std::exp(-kI * dot(k, x_center));
}

cdouble integrate_localized(const std::function<cdouble(std::span<const double>)> &fn,
                            std::span<const double> center, const LocalizedOptions &lo) {
    const int dims = static_cast<int>(center.size());
    const double radius = lo.radius;
    const double osc = std::max(lo.oscillation, 0.0);
    numerics::QuadratureOptions opts;
    opts.rel_tol = lo.rel_tol;
    opts.max_panels = 50000;
    double scale = std::abs(fn(center)) * std::pow(2.0 * radius, dims);
    opts.abs_tol = std::max(lo.rel_tol * 1e-4 * scale, 1e-300);
    std::vector<double> bps;
    auto radial_breakpoints = [&](double a, double b) {
        if (osc > 0.0) {
            int panels = std::min(2000, static_cast<int>(std::ceil((b - a) * osc / (kPi / 2.0))));
            for (int i = 1; i < panels; ++i) {
                bps.push_back(a + (b - a) * i / panels);
            }
        }
    };
    if (dims == 1) {
        double a = center[0] - radius, b = center[0] + radius;
        radial_breakpoints(a, b);
        return numerics::integrate_adaptive(
                   [&](double k) {
                       double kk[1] = {k};
                       return fn(kk);
                   },
                   a, b, opts, bps)
            .value;
    }
    if (dims != 3) {
        throw InvalidArgument("integrate_localized supports 1 or 3 dimensions");
    }
    // orthonormal frame (e1, e2, e3) with e3 along the requested axis
    std::array<double, 3> e3{0.0, 0.0, 1.0};
    if (lo.axis.size() == 3) {
        double n = std::sqrt(norm2(lo.axis));
        if (n > 0.0) {
            e3 = {lo.axis[0] / n, lo.axis[1] / n, lo.axis[2] / n};
        }
    }
    std::array<double, 3> t{1.0, 0.0, 0.0};
    if (std::abs(e3[0]) > 0.9) {
        t = {0.0, 1.0, 0.0};
    }
    double td = t[0] * e3[0] + t[1] * e3[1] + t[2] * e3[2];
    std::array<double, 3> e1{t[0] - td * e3[0], t[1] - td * e3[1], t[2] - td * e3[2]};
    double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (double &c : e1) {
        c /= n1;
    }
    std::array<double, 3> e2{e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2],
                             e3[0] * e1[1] - e3[1] * e1[0]};
    double tosc = lo.transverse_oscillation < 0.0 ? osc : lo.transverse_oscillation;
    int n_u = std::clamp(static_cast<int>(16 + std::ceil(0.7 * radius * osc)), 16, 200);
    int n_phi = std::clamp(static_cast<int>(32 + std::ceil(1.4 * radius * tosc)), 32, 400);
    numerics::GaussRule gl = numerics::gauss_legendre(n_u);
    std::vector<double> cphi(n_phi), sphi(n_phi);
    for (int j = 0; j < n_phi; ++j) {
        cphi[j] = std::cos(2.0 * kPi * j / n_phi);
        sphi[j] = std::sin(2.0 * kPi * j / n_phi);
    }
    auto shell = [&](double q) {
        numerics::CompensatedSum<cdouble> acc;
        double k[3];
        for (int i = 0; i < n_u; ++i) {
            double u = gl.nodes[i];
            double s = std::sqrt(std::max(0.0, 1.0 - u * u));
            numerics::CompensatedSum<cdouble> ring;
            for (int j = 0; j < n_phi; ++j) {
                double a = q * s * cphi[j], b = q * s * sphi[j], c = q * u;
                for (int d = 0; d < 3; ++d) {
                    k[d] = center[d] + a * e1[d] + b * e2[d] + c * e3[d];
                }
                ring.add(fn(k));
            }
            acc.add(gl.weights[i] * ring.value());
        }
        return acc.value() * (2.0 * kPi / n_phi) * q * q;
    };
    radial_breakpoints(0.0, radius);
    return numerics::integrate_adaptive(shell, 0.0, radius, opts, bps).value;
}

double massshell_norm(const GaussianPacket &f, const Conventions &conv) {
    validate(conv);
    f.validate(conv.spatial_dims);
    auto fn = [&](std::span<const double> k) {
        return cdouble(std::norm(f(k)) / (2.0 * conv.energy(norm2(k))), 0.0);
    };
    LocalizedOptions lo;
    lo.radius = 9.0 * f.sigma_k;
    lo.rel_tol = 1e-12;
    return integrate_localized(fn, f.k_center, lo).real();
}

double flat_norm(const GaussianPacket &f) {
    return f.norm * f.norm * std::pow(2.0 * kPi * f.sigma_k * f.sigma_k, 0.5 * f.dims());
}

GaussianPacket normalized(GaussianPacket f, const Conventions &conv) {
    f.norm = 1.0;
    f.norm = 1.0 / std::sqrt(massshell_norm(f, conv));
    return f;
}

cdouble position_shape(const GaussianPacket &f, double t, std::span<const double> x, const Conventions &conv) {
    validate(conv);
    f.validate(conv.spatial_dims);
    check_vector(x, conv.spatial_dims, "position");
    double dt = t - f.t0;
    auto fn = [&](std::span<const double> k) {
        return f(k) * std::exp(kI * (dot(k, x) - conv.energy(norm2(k)) * dt));
    };
    LocalizedOptions lo;
    lo.radius = 13.0 * f.sigma_k;
    lo.axis.resize(conv.spatial_dims);
    for (int i = 0; i < conv.spatial_dims; ++i) {
        lo.axis[i] = x[i] - f.x_center[i];
    }
    lo.oscillation = std::sqrt(norm2(lo.axis)) + std::abs(dt);
    lo.transverse_oscillation = std::abs(dt);
    cdouble v = integrate_localized(fn, f.k_center, lo);
    return v / std::pow(2.0 * kPi, conv.spatial_dims);
}

cdouble position_shape_at_reference(const GaussianPacket &f, std::span<const double> x) {
    int d = f.dims();
    double r2 = 0.0;
    double phase = 0.0;
    for (int i = 0; i < d; ++i) {
        double dx = x[i] - f.x_center[i];
        r2 += dx * dx;
        phase += f.k_center[i] * dx;
    }
    double s2 = f.sigma_k * f.sigma_k;
    double amp = f.norm * std::pow(4.0 * kPi * s2, 0.5 * d) / std::pow(2.0 * kPi, d) * std::exp(-s2 * r2);
    return amp * std::exp(kI * phase);
}

void EPRFamily::validate(int dims) const {
    check_vector(q_total, dims, "epr q_total");
    if (!(sigma_epr >= 0.0) || !std::isfinite(sigma_epr)) {
        throw InvalidArgument("epr sigma must be non-negative");
    }
    if (!std::isfinite(pair_time) || !std::isfinite(amplitude) || amplitude == 0.0) {
        throw InvalidArgument("epr pair_time must be finite and amplitude finite and nonzero");
    }
}

cdouble EPRFamily::operator()(std::span<const double> k1, std::span<const double> k2, const Conventions &conv) const {
    if (sigma_epr == 0.0) {
        throw InvalidArgument("the ideal EPR pair has no pointwise amplitude");
    }
    double d2 = 0.0;
    for (size_t i = 0; i < k1.size(); ++i) {
        double d = k1[i] + k2[i] - q_total[i];
        d2 += d * d;
    }
    double e = conv.energy(norm2(k1)) + conv.energy(norm2(k2));
    return amplitude * std::exp(-d2 / (4.0 * sigma_epr * sigma_epr)) * std::exp(-kI * e * pair_time);
}

EPRFamily EPRFamily::delta_normalized(double sigma_epr, std::vector<double> q_total, double pair_time) {
    if (!(sigma_epr > 0.0)) {
        throw InvalidArgument("delta normalization needs sigma_epr > 0");
    }
    double d = static_cast<double>(q_total.size());
    EPRFamily e{sigma_epr, std::move(q_total), pair_time, 1.0};
    e.amplitude = std::pow(4.0 * kPi * sigma_epr * sigma_epr, -0.5 * d);
    return e;
}

cdouble epr_overlap_with_povm_state(const EPRFamily &epr, const Outcome &outcome, const MomentumGrid &grid,
                                    const Conventions &conv, double xi0) {
    validate(conv);
    grid.validate();
    if (grid.dims != conv.spatial_dims) {
        throw InvalidArgument("grid and conventions disagree on spatial_dims");
    }
    epr.validate(grid.dims);
    check_vector(outcome.X, grid.dims, "outcome X");
    check_vector(outcome.P, grid.dims, "outcome P");
    const int half = (grid.n_points - 1) / 2;
    std::vector<int> p_step(grid.dims), q_step(grid.dims);
    for (int d = 0; d < grid.dims; ++d) {
        double ps = outcome.P[d] / grid.spacing;
        p_step[d] = static_cast<int>(std::lround(ps));
        if (std::abs(ps - p_step[d]) > 1e-9) {
            throw InvalidArgument("outcome P is not on the momentum lattice");
        }
        double qs = epr.q_total[d] / grid.spacing;
        q_step[d] = static_cast<int>(std::lround(qs));
    }
    numerics::CompensatedSum<cdouble> sum;
    std::vector<int> i1(grid.dims);
    for (size_t j = 0; j < grid.size(); ++j) {
        auto i2 = grid.unflatten(j);
        bool on_grid = true;
        for (int d = 0; d < grid.dims; ++d) {
            // k1 = P - k2 in lattice units
            int s1 = p_step[d] - (i2[d] - half);
            if (s1 < -half || s1 > half) {
                on_grid = false;
            }
            i1[d] = s1 + half;
        }
        if (!on_grid) {
            continue;
        }
        auto k1 = grid.point(grid.flatten(i1));
        auto k2 = grid.point(j);
        double e = conv.energy(norm2(k1)) + conv.energy(norm2(k2));
        cdouble phi = std::exp(kI * (dot(k2, outcome.X) - e * xi0));
        cdouble F;
        if (epr.sigma_epr == 0.0) {
            bool hit = p_step == q_step;
            F = hit ? std::exp(-kI * e * epr.pair_time) : cdouble(0.0);
        } else {
            F = epr(k1, k2, conv) / epr.amplitude;
        }
        sum.add(std::conj(phi) * F);
    }
    return sum.value();
}

}  // namespace fieldport
