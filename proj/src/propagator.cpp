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

#include "fieldport/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fieldport/bessel.hpp"
#include "fieldport/error.hpp"
#include "fieldport/numerics.hpp"

namespace fieldport {

namespace {

using numerics::BesselKind;
using numerics::QuadratureOptions;
using numerics::bessel;
using numerics::bessel_j1;
using numerics::bessel_k1;
using numerics::bessel_y1;
using numerics::QuadratureResult;
constexpr double kPi = std::numbers::pi;
constexpr double kRayAngle = kPi / 4.0;
const cdouble kI(0.0, 1.0);

struct Piece {
    cdouble value{};
    double error = 0.0;
};

cdouble csqrt_energy(cdouble k, double m) {
    return std::sqrt(k * k + m * m);
}

cdouble csinc(cdouble z) {
    if (std::abs(z) < 1e-4) {
        return 1.0 - z * z / 6.0;
    }
    return std::sin(z) / z;
}

// Breakpoints on [0, kmax] so that each panel spans at most pi/2 of phase,
// given |d phase/dk| <= rate(k) with rate monotone between neighbours.
std::vector<double> phase_breakpoints(double kmax, const std::function<double(double)> &rate) {
    std::vector<double> out;
    double k = 0.0;
    double min_step = kmax / 4000.0;
    while (true) {
        double r0 = rate(k);
        double step = (kPi / 2.0) / std::max(r0, 1e-300);
        double r1 = rate(std::min(kmax, k + step));
        step = (kPi / 2.0) / std::max({r0, r1, 1e-300});
        step = std::clamp(step, min_step, kmax / 4.0);
        k += step;
        if (k >= kmax * (1.0 - 1e-12)) {
            break;
        }
        out.push_back(k);
    }
    return out;
}

QuadratureOptions piece_options(const AccuracyRequest &acc) {
    QuadratureOptions o;
    o.rel_tol = acc.rel_tol;
    o.abs_tol = acc.abs_tol;
    o.max_panels = 40000;
    return o;
}

// Integral over k in [0, inf) of integrand(k). Pushing k into the half plane
// sign(dir) * Im k > 0 makes the integrand decay at a rate proportional to
// margin(rho), linear in rho = Re k / Re k0, positive at rho = 1; on the real
// axis |d phase/dk| = max(|margin(rho)|, phase_floor). The real axis is
// followed until margin is within a factor of two of its asymptotic value,
// then the contour turns onto a ray.
Piece contour_integral(const std::function<cdouble(cdouble)> &integrand, double dir, double margin_at_0,
                       double margin_at_1, double phase_floor, double mass, const AccuracyRequest &acc) {
    QuadratureOptions opts = piece_options(acc);
    auto margin = [&](double rho) { return margin_at_0 + (margin_at_1 - margin_at_0) * rho; };
    double lo = 0.5 * margin_at_1;
    double hi = 2.0 * margin_at_1;
    double rho_start = 0.0;
    if (margin_at_0 < lo) {
        rho_start = (lo - margin_at_0) / (margin_at_1 - margin_at_0);
    } else if (margin_at_0 > hi) {
        rho_start = (margin_at_0 - hi) / (margin_at_0 - margin_at_1);
    }
    rho_start = std::min(rho_start, 1.0 - 1e-15);
    double k_start = mass * rho_start / std::sqrt(1.0 - rho_start * rho_start);
    double m0 = margin(rho_start);
    Piece out;
    if (k_start > 0.0) {
        auto rate = [&](double k) {
            double rho = k / std::sqrt(k * k + mass * mass);
            return std::max(std::abs(margin(rho)), phase_floor);
        };
        auto bps = phase_breakpoints(k_start, rate);
        QuadratureResult seg = numerics::integrate_adaptive([&](double k) { return integrand(cdouble(k, 0.0)); },
                                                            0.0, k_start, opts, bps);
        out.value += seg.value;
        out.error += seg.est_error;
    }
    double angle = dir > 0 ? kRayAngle : -kRayAngle;
    // Safety factor: Re k / Re k0 along the ray is bounded below only
    // approximately by its value at the starting point.
    double decay = 0.5 * std::min(m0, margin_at_1) * std::sin(kRayAngle);
    double phase = std::max({m0, margin_at_1, phase_floor}) * std::cos(kRayAngle);
    QuadratureResult ray = numerics::integrate_ray(integrand, cdouble(k_start, 0.0), angle, decay, phase, opts);
    out.value += ray.value;
    out.error += ray.est_error;
    return out;
}

// Radial amplitude multiplying exp(i(sigma k r - k0 t)) in the split form.
cdouble split_amplitude(int dims, cdouble k, cdouble k0) {
    return dims == 3 ? k / k0 : 1.0 / k0;
}

void require_dims(int dims) {
    if (dims != 1 && dims != 3) {
        throw InvalidArgument("spatial_dims must be 1 or 3");
    }
}

void check_point(const FourVector &x, const Conventions &conv) {
    validate(conv);
    if (static_cast<int>(x.x.size()) != conv.spatial_dims) {
        std::ostringstream ss;
        ss << "point has " << x.x.size() << " spatial components, expected " << conv.spatial_dims;
        throw InvalidArgument(ss.str());
    }
    for (double c : x.x) {
        if (!std::isfinite(c)) {
            throw InvalidArgument("non-finite coordinate");
        }
    }
    if (!std::isfinite(x.t)) {
        throw InvalidArgument("non-finite time");
    }
}

// Integral I with D+ = -i I, via split pieces sigma = +1, -1.
Piece split_form(int dims, double r, double t, double m, const AccuracyRequest &acc) {
    Piece total;
    for (int sigma : {+1, -1}) {
        double a = sigma * r - t;
        double dir = a > 0 ? 1.0 : -1.0;
        // margin(rho) = dir * (sigma r - t rho)
        double margin0 = dir * sigma * r;
        double margin1 = std::abs(a);
        // sigma k r - k0 t written without cancelling large terms:
        // k0 - k = m^2 / (k0 + k).
        auto f = [=](cdouble k) {
            cdouble k0 = csqrt_energy(k, m);
            cdouble phase = k * a - t * (m * m) / (k0 + k);
            return split_amplitude(dims, k, k0) * std::exp(kI * phase);
        };
        Piece p = contour_integral(f, dir, margin0, margin1, 0.0, m, acc);
        double weight = dims == 3 ? double(sigma) : 1.0;
        total.value += weight * p.value;
        total.error += p.error;
    }
    return total;
}

// Integral I in the combined form, for timelike points with r well inside the cone.
Piece combined_form(int dims, double r, double t, double m, const AccuracyRequest &acc) {
    double dir = t > 0 ? -1.0 : 1.0;
    double at = std::abs(t);
    // worst piece margin(rho) = |t| rho - r
    auto f = [=](cdouble k) {
        cdouble k0 = csqrt_energy(k, m);
        cdouble e = std::exp(-kI * k0 * t);
        if (dims == 3) {
            return k * k / k0 * csinc(k * r) * e;
        }
        return std::cos(k * r) / k0 * e;
    };
    return contour_integral(f, dir, -r, at - r, at + r, m, acc);
}

double dims_prefactor(int dims, double r, double C, bool split) {
    if (dims == 3) {
        return split ? 2.0 * kPi * C / r : 2.0 * kPi * C;
    }
    return split ? C / 2.0 : C;
}

}  // namespace

double FourVector::interval() const {
    double s = 0.0;
    for (double c : x) {
        s += c * c;
    }
    return t * t - s;
}

double FourVector::spatial_norm() const {
    double s = 0.0;
    for (double c : x) {
        s += c * c;
    }
    return std::sqrt(s);
}

FourVector FourVector::operator-(const FourVector &o) const {
    if (x.size() != o.x.size()) {
        throw InvalidArgument("four-vectors of different dimension");
    }
    FourVector d{t - o.t, x};
    for (size_t i = 0; i < x.size(); ++i) {
        d.x[i] -= o.x[i];
    }
    return d;
}

FourVector FourVector::operator-() const {
    FourVector d{-t, x};
    for (double &c : d.x) {
        c = -c;
    }
    return d;
}

std::string to_string(Branch b) {
    return b == Branch::timelike ? "timelike" : "spacelike";
}

Branch classify(const FourVector &x) {
    double lam = x.interval();
    if (std::abs(lam) < kLightConeGuard) {
        std::ostringstream ss;
        ss << "point within light-cone guard band: |interval| = " << std::abs(lam);
        throw LightConeGuard(ss.str(), std::abs(lam));
    }
    return lam > 0 ? Branch::timelike : Branch::spacelike;
}

PropagatorValue dplus_quadrature(const FourVector &x, const Conventions &conv, const AccuracyRequest &acc) {
    check_point(x, conv);
    Branch b = classify(x);
    require_dims(conv.spatial_dims);
    int dims = conv.spatial_dims;
    double r = x.spatial_norm();
    double t = x.t;
    double m = conv.mass;
    bool split = !(b == Branch::timelike && r < 0.25 * std::abs(t));
    Piece p;
    try {
        p = split ? split_form(dims, r, t, m, acc) : combined_form(dims, r, t, m, acc);
    } catch (const ConvergenceFailure &e) {
        std::ostringstream ss;
        ss << "D+ quadrature failed at t=" << t << " |x|=" << r << ": " << e.what();
        throw ConvergenceFailure(ss.str(), e.best_estimate_abs, e.est_error);
    }
    double pref = dims_prefactor(dims, r, conv.contraction_norm, split);
    cdouble I = pref * p.value;
    if (split && dims == 3) {
        I /= 2.0 * kI;
    }
    return PropagatorValue{-kI * I, std::abs(pref) * p.error};
}

PropagatorValue dplus_quadrature_real_axis(const FourVector &x, const Conventions &conv,
                                           const AccuracyRequest &acc) {
    check_point(x, conv);
    classify(x);
    require_dims(conv.spatial_dims);
    int dims = conv.spatial_dims;
    double r = x.spatial_norm();
    double t = x.t;
    double m = conv.mass;
    QuadratureOptions opts = piece_options(acc);
    opts.max_panels = 200000;
    cdouble sum{};
    double err = 0.0;
    double pref;
    if (r == 0.0) {
        auto f = [=](double k) {
            double k0 = std::sqrt(k * k + m * m);
            cdouble amp = dims == 3 ? cdouble(k * k / k0) : cdouble(1.0 / k0);
            return amp * std::exp(-kI * k0 * t);
        };
        QuadratureResult q = numerics::integrate_oscillatory(f, 0.0, std::abs(t), opts);
        sum = q.value;
        err = q.est_error;
        pref = dims_prefactor(dims, r, conv.contraction_norm, false);
        cdouble I = pref * sum;
        return PropagatorValue{-kI * I, pref * err};
    }
    for (int sigma : {+1, -1}) {
        auto f = [=](double k) {
            double k0 = std::sqrt(k * k + m * m);
            double amp = dims == 3 ? k / k0 : 1.0 / k0;
            return amp * std::exp(kI * (sigma * k * r - k0 * t));
        };
        QuadratureResult q = numerics::integrate_oscillatory(f, 0.0, std::abs(sigma * r - t), opts);
        sum += (dims == 3 ? double(sigma) : 1.0) * q.value;
        err += q.est_error;
    }
    pref = dims_prefactor(dims, r, conv.contraction_norm, true);
    cdouble I = pref * sum;
    if (dims == 3) {
        I /= 2.0 * kI;
    }
    return PropagatorValue{-kI * I, pref * err};
}

PropagatorValue dplus_closed_form(const FourVector &x, const Conventions &conv, SignLayout layout) {
    check_point(x, conv);
    if (conv.spatial_dims != 3) {
        throw InvalidArgument("closed form is only available for spatial_dims = 3");
    }
    Branch b = classify(x);
    double lam = x.interval();
    double m = conv.mass;
    double s = std::sqrt(std::abs(lam));
    cdouble v;
    if (b == Branch::timelike) {
        double eps = x.t > 0 ? 1.0 : -1.0;
        double z = m * s;
        // The printed layout carries -i eps J1 inside the bracket.
        double j_sign = layout == SignLayout::matched ? eps : -eps;
        v = -kI * (m / (8.0 * kPi * s)) * cdouble(bessel_y1(z), j_sign * bessel_j1(z));
    } else {
        double sign = layout == SignLayout::matched ? -1.0 : 1.0;
        v = sign * kI * m * bessel_k1(m * s) / (4.0 * kPi * kPi * s);
        v = cdouble(0.0, v.imag());
    }
    v *= conv.closed_form_calibration;
    return PropagatorValue{v, 0.0};
}

cdouble dplus_1d_kernel(double t, double x, const Conventions &conv) {
    double lam = t * t - x * x;
    if (lam == 0.0) {
        throw LightConeGuard("1+1 kernel evaluated exactly on the light cone", 0.0);
    }
    double z = conv.mass * std::sqrt(std::abs(lam));
    double C = conv.contraction_norm;
    if (lam < 0.0) {
        return cdouble(0.0, -C * bessel(BesselKind::K0, z));
    }
    double eps = t > 0 ? 1.0 : -1.0;
    cdouble w = -C * (kPi / 2.0) * cdouble(bessel(BesselKind::Y0, z), eps * bessel(BesselKind::J0, z));
    return -kI * w;
}

PropagatorValue dplus_closed_form_1d(const FourVector &x, const Conventions &conv) {
    check_point(x, conv);
    if (conv.spatial_dims != 1) {
        throw InvalidArgument("1+1 closed form requires spatial_dims = 1");
    }
    classify(x);
    return PropagatorValue{dplus_1d_kernel(x.t, x.x[0], conv), 0.0};
}

PropagatorValue dplus(const FourVector &x, const Conventions &conv, Method method) {
    if (method == Method::quadrature) {
        return dplus_quadrature(x, conv);
    }
    return conv.spatial_dims == 3 ? dplus_closed_form(x, conv) : dplus_closed_form_1d(x, conv);
}

PropagatorValue dminus(const FourVector &x, const Conventions &conv, Method method) {
    PropagatorValue v = dplus(x, conv, method);
    v.value = std::conj(v.value);
    return v;
}

PropagatorValue pauli_jordan(const FourVector &x, const Conventions &conv, Method method) {
    PropagatorValue p = dplus(x, conv, method);
    PropagatorValue m = p;
    m.value = std::conj(p.value);
    return PropagatorValue{p.value + m.value, 2.0 * p.est_error};
}

cdouble measure_closed_form_calibration(const Conventions &conv) {
    if (conv.spatial_dims != 3) {
        throw InvalidArgument("calibration is defined for spatial_dims = 3");
    }
    Conventions raw = conv;
    raw.closed_form_calibration = 1.0;
    FourVector ref{0.0, {1.0 / conv.mass, 0.0, 0.0}};
    return dplus_closed_form(ref, raw).value / dplus_quadrature(ref, raw).value;
}

Conventions calibrated(Conventions conv) {
    cdouble ratio = measure_closed_form_calibration(conv);
    if (std::abs(ratio.imag()) > 1e-8 * std::abs(ratio)) {
        throw ConvergenceFailure("calibration ratio is not real", std::abs(ratio), std::abs(ratio.imag()));
    }
    // closed * cal should reproduce quadrature
    conv.closed_form_calibration = 1.0 / ratio.real();
    return conv;
}

CalibrationScan calibration_scan(std::span<const FourVector> points, const Conventions &conv, SignLayout layout) {
    if (points.empty()) {
        throw InvalidArgument("calibration scan needs at least one point");
    }
    Conventions raw = conv;
    raw.closed_form_calibration = 1.0;
    CalibrationScan scan;
    FourVector ref{0.0, {1.0 / conv.mass, 0.0, 0.0}};
    scan.reference_ratio = dplus_closed_form(ref, raw, layout).value / dplus_quadrature(ref, raw).value;
    for (const FourVector &p : points) {
        CalibrationPoint cp{p, classify(p), {}};
        cp.ratio = dplus_closed_form(p, raw, layout).value / dplus_quadrature(p, raw).value;
        scan.max_relative_variation = std::max(scan.max_relative_variation,
                                               std::abs(cp.ratio - scan.reference_ratio) /
                                                   std::abs(scan.reference_ratio));
        scan.points.push_back(std::move(cp));
    }
    return scan;
}

std::vector<FourVector> default_calibration_points() {
    std::vector<FourVector> pts;
    // spacelike
    for (double s : {0.3, 0.7, 1.5, 2.5, 4.0}) {
        pts.push_back({0.0, {s, 0.0, 0.0}});
    }
    pts.push_back({0.5, {0.0, 1.2, 0.0}});
    pts.push_back({-0.8, {0.6, 0.0, 1.0}});
    pts.push_back({1.0, {1.0, 1.0, 0.5}});
    pts.push_back({-2.0, {1.5, -2.0, 1.0}});
    pts.push_back({0.2, {-0.2, 0.3, -0.1}});
    pts.push_back({3.0, {0.0, 0.0, -3.5}});
    pts.push_back({0.05, {0.0, -0.9, 0.0}});
    // timelike
    for (double t : {0.4, 1.0, 2.3, 5.0}) {
        pts.push_back({t, {0.0, 0.0, 0.0}});
    }
    pts.push_back({-1.3, {0.0, 0.0, 0.0}});
    pts.push_back({1.5, {0.5, 0.0, 0.0}});
    pts.push_back({-2.0, {0.3, 0.8, -0.6}});
    pts.push_back({3.0, {1.0, 2.0, 0.0}});
    pts.push_back({0.9, {0.2, -0.3, 0.4}});
    pts.push_back({-4.0, {0.0, -3.0, 1.0}});
    pts.push_back({2.0, {0.0, 1.9, 0.0}});
    pts.push_back({0.6, {0.1, 0.1, 0.1}});
    return pts;
}

DecayFit decay_fit(double mass, double s_lo, double s_hi, int samples, Conventions conv) {
    if (!(mass > 0) || !std::isfinite(mass)) {
        throw InvalidArgument("mass must be positive");
    }
    if (samples < 3) {
        throw InvalidArgument("decay fit needs at least 3 samples");
    }
    if (!(s_lo < s_hi)) {
        throw InvalidArgument("decay fit range is degenerate");
    }
    if (s_lo < 2.0 / mass - 1e-12 || s_hi > 8.0 / mass + 1e-12) {
        throw InvalidArgument("decay fit range must lie within [2/m, 8/m]");
    }
    conv.mass = mass;
    validate(conv);
    DecayFit fit;
    double power = conv.spatial_dims / 4.0;
    for (int i = 0; i < samples; ++i) {
        double s = s_lo + (s_hi - s_lo) * i / (samples - 1);
        FourVector p{0.0, SpatialVector(conv.spatial_dims, 0.0)};
        p.x[0] = s;
        PropagatorValue v;
        try {
            v = dplus_quadrature(p, conv);
        } catch (const ConvergenceFailure &e) {
            std::ostringstream ss;
            ss << "decay fit: quadrature failed at s = " << s << ": " << e.what();
            throw ConvergenceFailure(ss.str(), e.best_estimate_abs, e.est_error);
        }
        fit.s.push_back(s);
        fit.corrected_log.push_back(std::log(std::abs(v.value)) + power * std::log(s * s));
    }
    numerics::LineFit lf = numerics::fit_line(fit.s, fit.corrected_log);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.rms_residual = lf.rms_residual;
    return fit;
}

}  // namespace fieldport
