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

#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "fieldport/conventions.hpp"
#include "fieldport/grid.hpp"

namespace fieldport {

using cdouble = std::complex<double>;

/// f(k) = norm * exp(-|k - k_center|^2 / (4 sigma_k^2)) * exp(-i k.x_center)
struct GaussianPacket {
    std::vector<double> k_center;
    double sigma_k = 1.0;
    std::vector<double> x_center;
    double t0 = 0.0;
    double norm = 1.0;

    int dims() const {
        return static_cast<int>(k_center.size());
    }
    /// Throws InvalidArgument for non-positive width or inconsistent sizes.
    void validate(int dims) const;
    cdouble operator()(std::span<const double> k) const;
};

/// int d^D k / (2 k0) |f(k)|^2
double massshell_norm(const GaussianPacket &f, const Conventions &conv);
/// int d^D k |f(k)|^2 (closed form)
double flat_norm(const GaussianPacket &f);
/// Copy of f rescaled to unit mass-shell norm.
GaussianPacket normalized(GaussianPacket f, const Conventions &conv);

/// (2 pi)^-D int d^D k f(k) exp(i k.x) exp(-i k0 (t - t0)), by quadrature.
cdouble position_shape(const GaussianPacket &f, double t, std::span<const double> x, const Conventions &conv);
/// The same at t = t0, where the integral is an elementary Gaussian.
cdouble position_shape_at_reference(const GaussianPacket &f, std::span<const double> x);

/// F(k1, k2) = amplitude * exp(-|k1 + k2 - q_total|^2 / (4 sigma_epr^2))
///             * exp(-i (k1^0 + k2^0) pair_time)
/// sigma_epr = 0 denotes the ideal pair; on a grid it becomes the Kronecker
/// delta of k1 + k2 = q_total.
struct EPRFamily {
    double sigma_epr = 0.1;
    std::vector<double> q_total;
    double pair_time = 0.0;
    double amplitude = 1.0;

    void validate(int dims) const;
    cdouble operator()(std::span<const double> k1, std::span<const double> k2, const Conventions &conv) const;

    /// Family whose total-momentum Gaussian integrates to one, so it tends
    /// to delta(k1 + k2 - q_total) as sigma_epr -> 0.
    static EPRFamily delta_normalized(double sigma_epr, std::vector<double> q_total, double pair_time = 0.0);
};

/// Overlap of the grid EPR state with the measurement vector of outcome
/// (X, P) in its total-momentum form, whose coefficients are
/// delta(k1 + k2 = P) exp(i k2.X - i (k1^0 + k2^0) xi0). The EPR amplitude is
/// divided by its peak value, so the ideal pair gives n^D on (X, P) =
/// (0, q_total) and 0 at every other lattice outcome.
cdouble epr_overlap_with_povm_state(const EPRFamily &epr, const Outcome &outcome, const MomentumGrid &grid,
                                    const Conventions &conv, double xi0);

struct LocalizedOptions {
    double radius = 1.0;       // the integrand is negligible beyond this distance from the center
    double oscillation = 0.0;  // expected phase rate along `axis`
    /// Phase rate across the axis; negative means "same as oscillation".
    double transverse_oscillation = -1.0;
    /// Polar axis of the angular rule in 3D (defaults to z).
    std::vector<double> axis;
    double rel_tol = 1e-11;
};

/// Integral over R^D of a function concentrated around `center`. D = 1 is
/// adaptive Gauss-Kronrod with breakpoints spaced by the phase rate; D = 3
/// nests an adaptive radial integral around a Gauss-Legendre (polar) x
/// trapezoid (azimuth) rule sized from the phase rates.
cdouble integrate_localized(const std::function<cdouble(std::span<const double>)> &fn,
                            std::span<const double> center, const LocalizedOptions &opts);

}  // namespace fieldport
