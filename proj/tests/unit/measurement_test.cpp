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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "fieldport/error.hpp"

using namespace fieldport;

namespace {

MomentumGrid grid1(int n, double dk) {
    return MomentumGrid{1, n, dk};
}

}  // namespace

TEST(Povm, NonrelativisticInteriorIsComplete) {
    auto conv = default_conventions(1);
    auto rep = completeness_defect(PovmFamily::nonrelativistic, grid1(17, 0.2), conv);
    EXPECT_LE(rep.defect_interior, 1e-10);
    EXPECT_GT(rep.boundary_size, 0u);
    EXPECT_DOUBLE_EQ(rep.defect_full, 1.0);
    EXPECT_EQ(rep.interior_size + rep.boundary_size, 17u * 17u);
}

TEST(Povm, NonrelativisticThreeDimensional) {
    auto conv = default_conventions(3);
    auto rep = completeness_defect(PovmFamily::nonrelativistic, MomentumGrid{3, 3, 0.5}, conv);
    EXPECT_LE(rep.defect_interior, 1e-10);
}

TEST(Povm, RelativisticDefectShrinksWithSpacing) {
    auto conv = default_conventions(1);
    // Fixed cutoff, halved spacing.
    auto coarse = completeness_defect(PovmFamily::relativistic, grid1(17, 0.4), conv);
    auto fine = completeness_defect(PovmFamily::relativistic, grid1(33, 0.2), conv);
    ASSERT_GT(fine.defect_interior, 0.0);
    EXPECT_GE(coarse.defect_interior / fine.defect_interior, 1.8);
    EXPECT_LT(fine.defect_interior, 1e-2);
}

TEST(Povm, RelativisticXi0Independence) {
    auto conv = default_conventions(1);
    auto g = grid1(15, 0.3);
    auto a = completeness_defect(PovmFamily::relativistic, g, conv, {0.0, std::nullopt, 1});
    auto b = completeness_defect(PovmFamily::relativistic, g, conv, {2.7, std::nullopt, 1});
    EXPECT_NEAR(a.defect_interior, b.defect_interior, 1e-12);
}

TEST(Povm, ThreadCountDoesNotChangeResult) {
    auto conv = default_conventions(1);
    auto g = grid1(15, 0.3);
    auto a = completeness_defect(PovmFamily::relativistic, g, conv, {0.4, std::nullopt, 1});
    auto b = completeness_defect(PovmFamily::relativistic, g, conv, {0.4, std::nullopt, 4});
    EXPECT_EQ(a.defect_interior, b.defect_interior);
    EXPECT_EQ(a.min_eigenvalue, b.min_eigenvalue);
}

TEST(Povm, DeletingAnOutcomeBreaksCompleteness) {
    auto conv = default_conventions(1);
    auto g = grid1(11, 0.3);
    size_t victim = 3 + 11 * 6;
    auto rep = completeness_defect(PovmFamily::nonrelativistic, g, conv, {0.0, victim, 1});
    auto op = build_povm_nr(g.outcome(victim), g);
    double norm = op.weight * op.vector.squaredNorm();
    EXPECT_NEAR(rep.defect_interior, norm, 1e-10);
    EXPECT_GT(rep.defect_interior, 0.05);
}

TEST(Povm, ElementsAreRankOneHermitianPositive) {
    auto conv = default_conventions(1);
    auto g = grid1(9, 0.3);
    for (size_t o : {size_t{0}, size_t{40}, size_t{80}}) {
        auto out = g.outcome(o);
        for (auto op : {build_povm_nr(out, g), build_povm_rel(out, g, 0.5, conv)}) {
            Eigen::MatrixXcd m = op.matrix();
            EXPECT_LE((m - m.adjoint()).norm(), 1e-14);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
            auto ev = es.eigenvalues();
            EXPECT_GE(ev.minCoeff(), -1e-12);
            int nonzero = 0;
            for (Eigen::Index i = 0; i < ev.size(); ++i) {
                nonzero += ev[i] > 1e-10;
            }
            EXPECT_EQ(nonzero, 1);
        }
        // Trace of the unit-weight projector counts surviving pairs.
        auto nr = build_povm_nr(out, g);
        int steps = std::abs(g.p_steps(o)[0]);
        EXPECT_NEAR(nr.vector.squaredNorm(), 9 - steps, 1e-12);
    }
}

TEST(Povm, SpectatorActsAsIdentity) {
    auto conv = default_conventions(1);
    auto g = grid1(5, 0.4);
    auto out = g.outcome(7);
    auto plain = build_povm_rel(out, g, 0.1, conv);
    auto spec = build_povm_rel(out, g, 0.1, conv, true);
    EXPECT_EQ(spec.dimension(), plain.dimension() * 5);
    Eigen::MatrixXcd expected =
        Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(5, 5), plain.matrix()).eval();
    EXPECT_LE((spec.matrix() - expected).norm(), 1e-14);
}

TEST(Povm, CellMeasure) {
    auto c1 = default_conventions(1);
    // Exact one-dimensional cell integral of 1/(2 sqrt(k^2+1)).
    EXPECT_NEAR(cell_measure({0.0}, 0.2, c1), std::asinh(0.1), 1e-15);
    auto c3 = default_conventions(3);
    double mu = cell_measure({0.3, -0.2, 0.1}, 0.1, c3);
    double point = 1e-3 / (2.0 * c3.energy(0.14));
    EXPECT_NEAR(mu / point, 1.0, 1e-3);
}

TEST(Povm, RejectsOffLatticeMomentum) {
    auto g = grid1(7, 0.3);
    EXPECT_THROW(build_povm_nr(Outcome{{0.0}, {0.1}}, g), InvalidArgument);
    EXPECT_THROW(build_povm_nr(Outcome{{0.0, 0.0}, {0.0, 0.0}}, g), InvalidArgument);
}

TEST(PhiKernel, SupportAndPhase) {
    auto g = grid1(7, 0.5);
    double dx = g.dual_spacing();
    Outcome o{{2 * dx}, {0.5}};
    auto v = phi_kernel(o, {dx}, 0.0, {-dx}, 0.0, g);
    EXPECT_NEAR(std::abs(v - std::exp(std::complex<double>(0.0, 0.5 * dx)) / dx), 0.0, 1e-14);
    EXPECT_EQ(phi_kernel(o, {dx}, 0.0, {0.0}, 0.0, g), std::complex<double>(0.0));
    // Wraps around the ring.
    EXPECT_NE(phi_kernel(o, {-3 * dx}, 0.0, {2 * dx}, 0.0, g), std::complex<double>(0.0));
    EXPECT_THROW(phi_kernel(o, {dx}, 0.0, {-dx}, 0.1, g), InvalidArgument);
    EXPECT_THROW(phi_kernel(o, {0.3 * dx}, 0.0, {-dx}, 0.0, g), InvalidArgument);
}

TEST(PhiKernel, CompletenessIsExact) {
    EXPECT_LE(phi_completeness_defect(grid1(7, 0.5)), 1e-12);
    EXPECT_LE(phi_completeness_defect(grid1(9, 0.2)), 1e-12);
}
