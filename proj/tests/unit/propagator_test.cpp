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

#include <gtest/gtest.h>

#include <random>

#include "fieldport/error.hpp"

using namespace fieldport;

namespace {

double rel(cdouble a, cdouble b) {
    return std::abs(a - b) / std::abs(b);
}

FourVector random_point(std::mt19937_64 &rng, int dims, bool spacelike) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    while (true) {
        FourVector p{u(rng), SpatialVector(dims)};
        for (double &c : p.x) {
            c = u(rng);
        }
        double lam = p.interval();
        if (std::abs(lam) > 0.05 && (lam < 0) == spacelike) {
            return p;
        }
    }
}

}  // namespace

TEST(Propagator, SpacelikeReferenceValue) {
    auto conv = default_conventions();
    auto v = dplus_quadrature({0.0, {1.0, 0.0, 0.0}}, conv);
    // -i K1(1) / (4 pi^2)
    EXPECT_NEAR(v.value.imag(), -0.0152464882516162198, 1e-15);
    EXPECT_LE(std::abs(v.value.real()), std::max(v.est_error, 1e-16));
    EXPECT_GE(v.est_error, 0.0);
}

TEST(Propagator, TimelikeReferenceValue) {
    auto conv = default_conventions();
    auto v = dplus_quadrature({1.0, {0.0, 0.0, 0.0}}, conv);
    EXPECT_NEAR(v.value.real(), 0.0175090564829475257, 1e-14);
    EXPECT_NEAR(v.value.imag(), 0.0310834705291766128, 1e-14);
}

TEST(Propagator, OneDimensionalReferenceValue) {
    auto conv = default_conventions(1);
    auto v = dplus_quadrature({1.0, {0.5}}, conv);
    EXPECT_NEAR(v.value.real(), -0.205277021697176764, 1e-13);
    EXPECT_NEAR(v.value.imag(), -0.00615192380702492363, 1e-13);
}

TEST(Propagator, GuardBand) {
    auto conv = default_conventions();
    EXPECT_THROW(dplus_quadrature({0.0, {0.0, 0.0, 0.0}}, conv), LightConeGuard);
    try {
        dplus_quadrature({1.0, {1.0 - 2e-7, 0.0, 0.0}}, conv);
        FAIL();
    } catch (const LightConeGuard &e) {
        EXPECT_NEAR(e.distance_to_cone, 4e-7, 1e-9);
    }
    EXPECT_THROW(dplus_closed_form({2.0, {0.0, 2.0, 0.0}}, conv), LightConeGuard);
    EXPECT_THROW(dminus({0.0, {0.0, 0.0, 0.0}}, conv, Method::closed_form), LightConeGuard);
}

TEST(Propagator, NearConeStillConverges) {
    auto conv = default_conventions();
    for (FourVector p : {FourVector{1.0, {0.999999, 0.0, 0.0}}, FourVector{1.0, {1.000001, 0.0, 0.0}},
                         FourVector{-3.0, {0.0, 0.0, 3.0000002}}}) {
        auto q = dplus_quadrature(p, conv);
        auto c = dplus_closed_form(p, conv);
        EXPECT_LT(rel(c.value, q.value), 1e-9) << p.t;
    }
}

TEST(Propagator, RejectsMalformedInput) {
    auto conv = default_conventions();
    EXPECT_THROW(dplus_quadrature({0.0, {1.0}}, conv), InvalidArgument);
    EXPECT_THROW(dplus_closed_form({0.0, {1.0}}, default_conventions(1)), InvalidArgument);
    EXPECT_THROW(dplus_closed_form_1d({0.0, {1.0, 0.0, 0.0}}, conv), InvalidArgument);
    EXPECT_THROW(dplus_quadrature({std::nan(""), {1.0, 0.0, 0.0}}, conv), InvalidArgument);
}

TEST(Propagator, IndependentQuadratureRoutesAgree) {
    auto conv3 = default_conventions();
    auto conv1 = default_conventions(1);
    for (FourVector p : {FourVector{0.0, {1.0, 0.0, 0.0}}, FourVector{0.5, {0.3, 1.0, 0.2}},
                         FourVector{1.0, {0.5, 0.0, 0.0}}, FourVector{-2.0, {0.0, 0.0, 0.0}}}) {
        auto a = dplus_quadrature(p, conv3);
        auto b = dplus_quadrature_real_axis(p, conv3);
        EXPECT_LT(std::abs(a.value - b.value), 1e-9 * std::abs(a.value)) << p.t;
    }
    for (FourVector p : {FourVector{0.0, {1.0}}, FourVector{1.2, {1.1}}, FourVector{-0.3, {2.0}}}) {
        auto a = dplus_quadrature(p, conv1);
        auto b = dplus_quadrature_real_axis(p, conv1);
        EXPECT_LT(std::abs(a.value - b.value), 1e-9 * std::abs(a.value)) << p.t;
    }
}

TEST(Propagator, ClosedFormMatchesQuadrature) {
    auto conv = default_conventions();
    auto pts = default_calibration_points();
    ASSERT_GE(pts.size(), 20u);
    auto scan = calibration_scan(pts, conv);
    EXPECT_NEAR(scan.reference_ratio.real(), 1.0, 1e-10);
    EXPECT_NEAR(scan.reference_ratio.imag(), 0.0, 1e-10);
    EXPECT_LT(scan.max_relative_variation, 1e-9);
    int timelike = 0;
    for (auto &p : scan.points) {
        timelike += p.branch == Branch::timelike;
    }
    EXPECT_GT(timelike, 5);
    EXPECT_GT(static_cast<int>(pts.size()) - timelike, 5);
}

TEST(Propagator, PrintedLayoutIsNotAConstantMultiple) {
    auto conv = default_conventions();
    auto pts = default_calibration_points();
    auto scan = calibration_scan(pts, conv, SignLayout::as_printed);
    EXPECT_NEAR(scan.reference_ratio.real(), -1.0, 1e-10);
    EXPECT_GT(scan.max_relative_variation, 0.1);
}

TEST(Propagator, CalibratedConventions) {
    auto conv = calibrated(default_conventions());
    EXPECT_NEAR(conv.closed_form_calibration, 1.0, 1e-10);
    conv.closed_form_calibration = 2.0;
    auto v = dplus_closed_form({0.0, {1.0, 0.0, 0.0}}, conv);
    EXPECT_NEAR(v.value.imag(), -2.0 * 0.0152464882516162198, 1e-14);
    EXPECT_THROW(calibrated(default_conventions(1)), InvalidArgument);
}

TEST(Propagator, ClosedForm1dMatchesQuadrature) {
    auto conv = default_conventions(1);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        auto p = random_point(rng, 1, i % 2 == 0);
        auto q = dplus_quadrature(p, conv);
        auto c = dplus_closed_form_1d(p, conv);
        EXPECT_LT(rel(c.value, q.value), 1e-10) << p.t << " " << p.x[0];
    }
}

TEST(PropagatorProperty, Microcausality) {
    std::mt19937_64 rng(1);
    for (int dims : {1, 3}) {
        auto conv = default_conventions(dims);
        for (int i = 0; i < 30; ++i) {
            auto p = random_point(rng, dims, true);
            auto exact = pauli_jordan(p, conv, Method::closed_form);
            EXPECT_EQ(exact.value, cdouble(0.0, 0.0));
            auto q = pauli_jordan(p, conv, Method::quadrature);
            auto d = dplus_quadrature(p, conv);
            EXPECT_LE(std::abs(q.value), std::max(10.0 * d.est_error, 1e-12 * std::abs(d.value)));
        }
    }
}

TEST(PropagatorProperty, ConjugationAndReflection) {
    std::mt19937_64 rng(2);
    for (int dims : {1, 3}) {
        auto conv = default_conventions(dims);
        for (int i = 0; i < 24; ++i) {
            auto p = random_point(rng, dims, i % 2 == 0);
            for (Method m : {Method::quadrature, Method::closed_form}) {
                auto plus = dplus(p, conv, m);
                auto minus = dminus(p, conv, m);
                EXPECT_EQ(minus.value, std::conj(plus.value));
                auto refl = dplus(-p, conv, m);
                double tol = std::max(1e-12 * std::abs(plus.value), 4.0 * (plus.est_error + refl.est_error));
                EXPECT_LE(std::abs(refl.value + std::conj(plus.value)), tol);
            }
        }
    }
}

TEST(PropagatorProperty, EqualTimeIsImaginary) {
    auto conv = default_conventions();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        auto p = random_point(rng, 3, true);
        p.t = 0.0;
        auto plus = dplus_quadrature(p, conv);
        auto minus = dminus(p, conv, Method::quadrature);
        EXPECT_LE(std::abs(plus.value.real()), plus.est_error + 1e-18);
        EXPECT_LE(std::abs(minus.value + plus.value), 2.0 * plus.est_error + 1e-18);
    }
}

TEST(PropagatorProperty, PauliJordanTimelikeIsOddAndReal) {
    auto conv = default_conventions();
    std::mt19937_64 rng(4);
    for (int i = 0; i < 10; ++i) {
        auto p = random_point(rng, 3, false);
        auto a = pauli_jordan(p, conv, Method::closed_form);
        auto b = pauli_jordan(-p, conv, Method::closed_form);
        EXPECT_EQ(a.value.imag(), 0.0);
        EXPECT_NE(a.value.real(), 0.0);
        EXPECT_NEAR(a.value.real(), -b.value.real(), 1e-15);
    }
}

TEST(DecayFit, RateMatchesMass) {
    auto conv = default_conventions();
    auto f1 = decay_fit(1.0, 2.0, 6.0, 12, conv);
    EXPECT_NEAR(f1.slope, -1.0, 0.05);
    auto f2 = decay_fit(2.0, 1.0, 3.0, 12, conv);
    EXPECT_NEAR(f2.slope, -2.0, 0.10);
    EXPECT_EQ(f1.s.size(), 12u);
}

TEST(DecayFit, RejectsBadRanges) {
    auto conv = default_conventions();
    EXPECT_THROW(decay_fit(1.0, 3.0, 3.0, 12, conv), InvalidArgument);
    EXPECT_THROW(decay_fit(1.0, 2.0, 6.0, 1, conv), InvalidArgument);
    EXPECT_THROW(decay_fit(1.0, 1.0, 6.0, 12, conv), InvalidArgument);
    EXPECT_THROW(decay_fit(1.0, 2.0, 9.0, 12, conv), InvalidArgument);
    EXPECT_THROW(decay_fit(-1.0, 2.0, 6.0, 12, conv), InvalidArgument);
}
