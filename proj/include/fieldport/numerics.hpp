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
#include <type_traits>
#include <vector>

namespace fieldport::numerics {

using cdouble = std::complex<double>;

struct QuadratureResult {
    cdouble value{};
    double est_error = 0.0;
    int panels_used = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_panels = 20000;
};

/// Neumaier-compensated running sum. Results depend only on the order of
/// `add` calls, never on how the terms were produced.
template <typename T>
class CompensatedSum {
   public:
    void add(T x) {
        add_part(sum_re_, comp_re_, re(x));
        if constexpr (!std::is_same_v<T, double>) {
            add_part(sum_im_, comp_im_, x.imag());
        }
    }
    T value() const {
        if constexpr (std::is_same_v<T, double>) {
            return sum_re_ + comp_re_;
        } else {
            return T(sum_re_ + comp_re_, sum_im_ + comp_im_);
        }
    }

   private:
    static double re(double x) {
        return x;
    }
    static double re(const cdouble &x) {
        return x.real();
    }
    static void add_part(double &sum, double &comp, double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double sum_re_ = 0.0, comp_re_ = 0.0;
    double sum_im_ = 0.0, comp_im_ = 0.0;
};

using RealIntegrand = std::function<cdouble(double)>;
using ComplexIntegrand = std::function<cdouble(cdouble)>;

/// One 21-point Gauss-Kronrod panel on [a, b]; error is |K21 - G10| with the
/// QUADPACK rescaling.
QuadratureResult gauss_kronrod_panel(const RealIntegrand &f, double a, double b);

/// Globally adaptive Gauss-Kronrod on [a, b]. `breakpoints` (inside (a, b))
/// seed the initial partition, e.g. at known integrable singularities.
/// Throws ConvergenceFailure when the panel budget runs out.
QuadratureResult integrate_adaptive(const RealIntegrand &f, double a, double b, const QuadratureOptions &opts = {},
                                    std::span<const double> breakpoints = {});

/// Integral of f over [a, inf) for oscillatory integrands with at most
/// algebraic decay (including Abel-summable ones that do not decay at all).
///
/// `phase_rate` is the asymptotic rate d(phase)/dk of the oscillation. Panels
/// are bounded to phase increments of pi/4 and each is integrated adaptively;
/// partial sums are taken every half period and the limit is extrapolated
/// with Wynn's epsilon algorithm. A non-oscillatory integrand (phase_rate <= 0)
/// is summed panel by panel until contributions die out.
QuadratureResult integrate_oscillatory(const RealIntegrand &f, double a, double phase_rate,
                                       const QuadratureOptions &opts = {});

/// Integral of an analytic integrand along the ray z0 + s e^{i angle},
/// s in [0, inf). The caller picks `angle` so that the integrand decays
/// exponentially along the ray; `decay_rate` is that exponential rate and
/// `phase_rate` the residual oscillation rate along the ray.
QuadratureResult integrate_ray(const ComplexIntegrand &f, cdouble z0, double angle, double decay_rate,
                               double phase_rate, const QuadratureOptions &opts = {});

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// last well-defined even-column estimate and, in `error`, the difference
/// to the previous one.
cdouble wynn_epsilon(std::span<const cdouble> partial_sums, double *error = nullptr);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on the
/// three-term recurrence).
GaussRule gauss_legendre(int n);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Needs >= 3 points and
/// non-constant xs; throws InvalidArgument otherwise.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

}  // namespace fieldport::numerics
