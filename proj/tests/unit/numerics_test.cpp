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

#include "fieldport/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fieldport/error.hpp"
#include "gtest/gtest.h"

using namespace fieldport;
using namespace fieldport::numerics;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Quadrature, exponential_on_half_line) {
    auto r = integrate_oscillatory([](double k) { return cdouble(std::exp(-k)); }, 0.0, 0.0);
    EXPECT_NEAR(r.value.real(), 1.0, 1e-12);
    EXPECT_GE(r.est_error, 0.0);
}

TEST(Quadrature, damped_cosine) {
    auto r = integrate_oscillatory([](double k) { return cdouble(std::exp(-k) * std::cos(50 * k)); }, 0.0, 50.0);
    EXPECT_NEAR(r.value.real(), 1.0 / 2501.0, 1e-10);
}

TEST(Quadrature, dirichlet_integral) {
    auto f = [](double k) { return cdouble(k == 0.0 ? 1.0 : std::sin(k) / k); };
    auto r = integrate_oscillatory(f, 0.0, 1.0);
    EXPECT_NEAR(r.value.real(), kPi / 2, 1e-10);
}

TEST(Quadrature, abel_summable_sine) {
    // int_0^inf sin(a k) dk = 1/a in the Abel sense.
    auto r = integrate_oscillatory([](double k) { return cdouble(std::sin(3.0 * k)); }, 0.0, 3.0);
    EXPECT_NEAR(r.value.real(), 1.0 / 3.0, 1e-10);
}

TEST(Quadrature, abel_summable_mass_shell_kernel) {
    // int_0^inf k sin(k r)/sqrt(k^2+m^2) dk = m K1(m r); K1(1) from a 40-digit reference.
    auto f = [](double k) { return cdouble(k * std::sin(k) / std::sqrt(k * k + 1.0)); };
    auto r = integrate_oscillatory(f, 0.0, 1.0);
    EXPECT_NEAR(r.value.real(), 0.6019072301972345747375400, 1e-9);
}

TEST(Quadrature, divergent_integrand_fails_loudly) {
    EXPECT_THROW(integrate_oscillatory([](double) { return cdouble(1.0); }, 0.0, 1.0), ConvergenceFailure);
    EXPECT_THROW(integrate_oscillatory([](double k) { return cdouble(k); }, 0.0, 0.0), ConvergenceFailure);
}

TEST(Quadrature, adaptive_with_log_singularity_at_breakpoint) {
    // int_0^2 log|x-1| dx = -2
    auto f = [](double x) { return cdouble(std::log(std::abs(x - 1.0))); };
    std::array<double, 1> bp{1.0};
    auto r = integrate_adaptive(f, 0.0, 2.0, {1e-12, 1e-12, 20000}, bp);
    EXPECT_NEAR(r.value.real(), -2.0, 1e-10);
}

TEST(Quadrature, ray_deformation_matches_closed_form) {
    // int_0^inf k sin k/(k^2+1) dk = pi/(2e), split into e^{+ik} and e^{-ik} rays.
    auto up = [](cdouble k) { return k * std::exp(cdouble(0, 1) * k) / (k * k + 1.0); };
    auto down = [](cdouble k) { return k * std::exp(cdouble(0, -1) * k) / (k * k + 1.0); };
    auto a = integrate_ray(up, 0.0, kPi / 4, std::sin(kPi / 4), std::cos(kPi / 4));
    auto b = integrate_ray(down, 0.0, -kPi / 4, std::sin(kPi / 4), std::cos(kPi / 4));
    cdouble v = (a.value - b.value) / cdouble(0, 2);
    EXPECT_NEAR(v.real(), kPi / (2 * std::exp(1.0)), 1e-11);
    EXPECT_NEAR(v.imag(), 0.0, 1e-11);
}

TEST(Quadrature, error_estimates_are_honest_on_battery) {
    int honest = 0, total = 0;
    auto check = [&](double value, double est, double truth) {
        ++total;
        double err = std::abs(value - truth);
        if (err <= 3 * est || err <= 4e-16 * std::abs(truth)) {
            ++honest;
        }
    };
    for (double a : {0.5, 1.0, 2.0, 5.0, 13.0}) {
        for (double b : {0.1, 0.5, 1.0, 3.0}) {
            auto r = integrate_oscillatory([=](double k) { return cdouble(std::exp(-b * k) * std::cos(a * k)); },
                                           0.0, a);
            check(r.value.real(), r.est_error, b / (a * a + b * b));
            auto s = integrate_oscillatory([=](double k) { return cdouble(std::exp(-b * k) * std::sin(a * k)); },
                                           0.0, a);
            check(s.value.real(), s.est_error, a / (a * a + b * b));
        }
        auto c = integrate_oscillatory([=](double k) { return cdouble(std::cos(a * k) / (1 + k * k)); }, 0.0, a);
        check(c.value.real(), c.est_error, kPi * std::exp(-a) / 2);
        auto d = integrate_oscillatory([=](double k) { return cdouble(std::sin(a * k)); }, 0.0, a);
        check(d.value.real(), d.est_error, 1.0 / a);
        auto e = integrate_oscillatory([=](double k) { return cdouble(k == 0 ? a : std::sin(a * k) / k); }, 0.0, a);
        check(e.value.real(), e.est_error, kPi / 2);
    }
    EXPECT_GE(static_cast<double>(honest) / total, 0.99) << honest << "/" << total;
}

TEST(Quadrature, repeated_evaluation_is_bit_identical) {
    auto f = [](double k) { return cdouble(std::cos(7 * k) / (1 + k * k), std::sin(k) * std::exp(-k)); };
    auto a = integrate_oscillatory(f, 0.0, 7.0);
    auto b = integrate_oscillatory(f, 0.0, 7.0);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.est_error, b.est_error);
}

TEST(Wynn, accelerates_alternating_harmonic_series) {
    std::vector<cdouble> partial;
    double s = 0;
    for (int n = 0; n < 20; ++n) {
        s += (n % 2 == 0 ? 1.0 : -1.0) / (n + 1);
        partial.push_back(s);
    }
    EXPECT_NEAR(wynn_epsilon(partial).real(), std::log(2.0), 1e-12);
}

TEST(CompensatedSum, recovers_cancelled_small_terms) {
    CompensatedSum<double> sum;
    sum.add(1e16);
    for (int i = 0; i < 1000; ++i) {
        sum.add(1.0);
    }
    sum.add(-1e16);
    EXPECT_EQ(sum.value(), 1000.0);
}

TEST(FitLine, exact_line) {
    std::vector<double> xs{0, 1, 2, 3, 4}, ys;
    for (double x : xs) {
        ys.push_back(2.5 * x - 1.0);
    }
    auto fit = fit_line(xs, ys);
    EXPECT_NEAR(fit.slope, 2.5, 1e-14);
    EXPECT_NEAR(fit.intercept, -1.0, 1e-14);
    EXPECT_LE(fit.rms_residual, 1e-14);
}

TEST(FitLine, noisy_unit_slope) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> noise(-1e-6, 1e-6);
    std::vector<double> xs, ys;
    for (int i = 0; i < 50; ++i) {
        xs.push_back(0.1 * i);
        ys.push_back(-0.1 * i + noise(rng));
    }
    EXPECT_NEAR(fit_line(xs, ys).slope, -1.0, 1e-5);
}

TEST(FitLine, rejects_degenerate_input) {
    std::vector<double> two{1, 2};
    EXPECT_THROW(fit_line(two, two), InvalidArgument);
    std::vector<double> flat{1, 1, 1}, ys{1, 2, 3};
    EXPECT_THROW(fit_line(flat, ys), InvalidArgument);
}
