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
#include <span>
#include <string>
#include <vector>

#include "fieldport/conventions.hpp"

namespace fieldport {

using cdouble = std::complex<double>;
using SpatialVector = std::vector<double>;

/// A point of Minkowski space in units of 1/m. `x` has `spatial_dims` entries.
struct FourVector {
    double t = 0.0;
    SpatialVector x;

    /// t^2 - |x|^2
    double interval() const;
    double spatial_norm() const;
    FourVector operator-(const FourVector &o) const;
    FourVector operator-() const;
};

enum class Branch { timelike, spacelike };
std::string to_string(Branch b);

struct PropagatorValue {
    cdouble value{};
    double est_error = 0.0;
};

struct AccuracyRequest {
    double rel_tol = 1e-11;
    double abs_tol = 1e-15;
};

/// Points with |interval| below this (units 1/m^2) are refused.
inline constexpr double kLightConeGuard = 1e-6;

enum class Method { quadrature, closed_form };

/// Which sign assignment of the printed Bessel closed form to use.
/// `matched` reverses the J1 term inside the cone and the K1 term outside it,
/// which makes both branches agree with the mass-shell integral;
/// `as_printed` keeps the printed layout (for conformance reporting only,
/// it is not a constant multiple of D+).
enum class SignLayout { matched, as_printed };

/// Throws LightConeGuard when |interval| < kLightConeGuard.
Branch classify(const FourVector &x);

/// D+(x) = -i C int d^D k/(2 k0) exp(i[k.x - k0 t]) over the mass shell.
///
/// The radial integral is split into single-phase pieces; each runs along
/// the real axis in panels of at most pi/4 phase and then continues on a
/// ray into the half plane where its exponential decays (the integrand is
/// analytic there), which turns the non-decaying oscillatory tail into an
/// exponentially convergent one.
PropagatorValue dplus_quadrature(const FourVector &x, const Conventions &conv, const AccuracyRequest &acc = {});

/// Same integral, real axis only, with Wynn-epsilon extrapolation of the
/// oscillatory tail. Slower and less accurate; used as an independent route.
PropagatorValue dplus_quadrature_real_axis(const FourVector &x, const Conventions &conv,
                                           const AccuracyRequest &acc = {});

/// Bessel-function closed form in 3+1 dimensions, times
/// conv.closed_form_calibration. Throws InvalidArgument for D != 3.
PropagatorValue dplus_closed_form(const FourVector &x, const Conventions &conv,
                                  SignLayout layout = SignLayout::matched);

/// Closed form in 1+1 dimensions (K0 outside the cone, Y0 and J0 inside).
/// Not scaled by closed_form_calibration (there is no printed 1+1 form).
PropagatorValue dplus_closed_form_1d(const FourVector &x, const Conventions &conv);

/// The 1+1 closed form without the guard band, for use inside integrals
/// whose nodes never sit exactly on the cone (log singularity there).
cdouble dplus_1d_kernel(double t, double x, const Conventions &conv);

PropagatorValue dplus(const FourVector &x, const Conventions &conv, Method method);
/// conj(D+(x))
PropagatorValue dminus(const FourVector &x, const Conventions &conv, Method method);
/// D+(x) + D-(x). Exactly zero outside the cone on the closed-form path.
PropagatorValue pauli_jordan(const FourVector &x, const Conventions &conv, Method method);

/// Ratio closed form / quadrature at the reference spacelike point (0, |x| = 1/m).
cdouble measure_closed_form_calibration(const Conventions &conv);

/// Copy of conv with closed_form_calibration measured (D = 3 only).
Conventions calibrated(Conventions conv);

struct CalibrationPoint {
    FourVector x;
    Branch branch;
    cdouble ratio;
};

struct CalibrationScan {
    std::vector<CalibrationPoint> points;
    cdouble reference_ratio;
    /// max_i |ratio_i - reference| / |reference|
    double max_relative_variation = 0.0;
};

/// Ratio closed form (calibration 1) / quadrature at each point.
CalibrationScan calibration_scan(std::span<const FourVector> points, const Conventions &conv,
                                 SignLayout layout = SignLayout::matched);

/// 24 off-cone points spanning both branches, both time orientations and
/// several directions, for D = 3.
std::vector<FourVector> default_calibration_points();

struct DecayFit {
    double slope = 0.0;  // fitted d log|D+| / ds, expected close to -m
    double intercept = 0.0;
    double rms_residual = 0.0;
    std::vector<double> s;
    std::vector<double> corrected_log;
};

/// Least-squares fit of log|D+(0, s)| + (D/4) log|interval| against s on a
/// uniform grid of `samples` points; the algebraic prefactor is removed as a
/// nuisance term, so only the exponential rate is fitted.
/// Requires [s_lo, s_hi] inside [2/m, 8/m] and samples >= 3.
DecayFit decay_fit(double mass, double s_lo, double s_hi, int samples, Conventions conv);

}  // namespace fieldport
