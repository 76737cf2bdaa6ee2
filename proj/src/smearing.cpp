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

#include "fieldport/smearing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fieldport/error.hpp"
#include "fieldport/numerics.hpp"

namespace fieldport {

namespace {

const cdouble kI(0.0, 1.0);

}  // namespace

cdouble smeared_two_point(const GaussianPacket &f, const GaussianPacket &g, const Conventions &conv) {
    validate(conv);
    f.validate(conv.spatial_dims);
    g.validate(conv.spatial_dims);
    const int D = conv.spatial_dims;
    double wf = 1.0 / (f.sigma_k * f.sigma_k), wg = 1.0 / (g.sigma_k * g.sigma_k);
    std::vector<double> center(D);
    LocalizedOptions lo;
    lo.axis.resize(D);
    double sep = 0.0;
    for (int i = 0; i < D; ++i) {
        center[i] = (f.k_center[i] * wf + g.k_center[i] * wg) / (wf + wg);
        lo.axis[i] = f.x_center[i] - g.x_center[i];
        sep += lo.axis[i] * lo.axis[i];
    }
    double sigma = 1.0 / std::sqrt(wf + wg);
    double dt = f.t0 - g.t0;
    auto fn = [&](std::span<const double> k) {
        double k2 = 0.0;
        for (double c : k) {
            k2 += c * c;
        }
        double k0 = conv.energy(k2);
        return std::conj(f(k)) * g(k) * std::exp(kI * k0 * dt) / (2.0 * k0);
    };
    // |conj(f) g| ~ exp(-|k - center|^2 / (4 sigma^2)) up to a constant
    lo.radius = 13.0 * sigma * std::sqrt(2.0);
    lo.oscillation = std::sqrt(sep) + std::abs(dt);
    lo.transverse_oscillation = std::abs(dt);
    cdouble v = integrate_localized(fn, center, lo);
    return -kI * conv.contraction_norm * v;
}

cdouble smeared_two_point_position(const GaussianPacket &f, const GaussianPacket &g, const Conventions &conv) {
    validate(conv);
    if (conv.spatial_dims != 1) {
        throw InvalidArgument("position-space smearing is implemented for spatial_dims = 1");
    }
    f.validate(1);
    g.validate(1);
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-300;
    opts.max_panels = 50000;
    double sf = f.sigma_k, sg = g.sigma_k;
    // H(u) = int dy conj(F(y)) G(y + u)
    double y_width = 1.0 / std::sqrt(sf * sf + sg * sg);
    auto H = [&](double u) {
        // the product peaks where sf^2 (y - xf)^2 + sg^2 (y + u - xg)^2 is smallest
        double yc = (sf * sf * f.x_center[0] + sg * sg * (g.x_center[0] - u)) / (sf * sf + sg * sg);
        double L = 9.0 * y_width;
        double osc = std::abs(f.k_center[0]) + std::abs(g.k_center[0]);
        std::vector<double> bps;
        int panels = std::min(400, static_cast<int>(std::ceil(2.0 * L * osc / (std::numbers::pi / 2.0))));
        for (int i = 1; i < panels; ++i) {
            bps.push_back(yc - L + 2.0 * L * i / panels);
        }
        numerics::QuadratureOptions inner = opts;
        inner.abs_tol = 1e-22;
        return numerics::integrate_adaptive(
                   [&](double y) {
                       double a[1] = {y}, b[1] = {y + u};
                       return std::conj(position_shape_at_reference(f, a)) * position_shape_at_reference(g, b);
                   },
                   yc - L, yc + L, inner, bps)
            .value;
    };
    double dt = g.t0 - f.t0;
    double u0 = g.x_center[0] - f.x_center[0];
    double u_width = std::sqrt(sf * sf + sg * sg) / (sf * sg);
    double a = u0 - 8.0 * u_width, b = u0 + 8.0 * u_width;
    std::vector<double> bps;
    for (double c : {-std::abs(dt), 0.0, std::abs(dt)}) {
        if (c > a && c < b) {
            bps.push_back(c);
        }
    }
    double osc = std::abs(f.k_center[0]) + std::abs(g.k_center[0]) + std::abs(dt);
    int panels = std::min(400, static_cast<int>(std::ceil((b - a) * osc / (std::numbers::pi / 2.0))));
    for (int i = 1; i < panels; ++i) {
        bps.push_back(a + (b - a) * i / panels);
    }
    std::sort(bps.begin(), bps.end());
    opts.abs_tol = 1e-20;
    return numerics::integrate_adaptive([&](double u) { return dplus_1d_kernel(dt, u, conv) * H(u); }, a, b, opts,
                                        bps)
        .value;
}

}  // namespace fieldport
