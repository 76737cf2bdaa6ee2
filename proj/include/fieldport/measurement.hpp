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
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fieldport/conventions.hpp"
#include "fieldport/grid.hpp"

namespace fieldport {

enum class MeasureKind { flat, mass_shell };

/// Rank-one measurement element weight * |v><v| on the orthonormal grid
/// basis of two particles (pair index i1 + N i2, N = grid.size()), or of
/// three particles when `spectator` is set (third index slowest), where the
/// element acts as the identity on the extra particle.
struct DiscretizedOperator {
    MomentumGrid grid;
    MeasureKind measure = MeasureKind::flat;
    bool spectator = false;
    Eigen::VectorXcd vector;
    double weight = 1.0;
    /// Per one-particle grid point: dk^D (flat) or the point kernel weight
    /// dk^D / (2 k0) (mass shell).
    std::vector<double> measure_weights;

    Eigen::Index dimension() const;
    Eigen::MatrixXcd matrix() const;
};

/// Position-space measurement kernel on the ring of positions dual to the
/// grid (spacing 2 pi / (n dk), periodic):
/// delta(xi1 - xi2 - X) exp(i P.xi1), with the delta realized as a Kronecker
/// delta divided by the ring cell volume. Both points must carry the same
/// time; throws InvalidArgument otherwise, or when a point is not on the ring.
std::complex<double> phi_kernel(const Outcome &outcome, const std::vector<double> &xi1, double t1,
                                const std::vector<double> &xi2, double t2, const MomentumGrid &grid);

/// max |sum_theta w Phi(xi1, xi2) conj(Phi(xi1', xi2')) - delta delta| * cell^2
/// over all ring quadruples (1D grids only; exact up to rounding).
double phi_completeness_defect(const MomentumGrid &grid);

/// |Phi_XP> = sum_k exp(i k.X) |k>|k+P>, weight n^-D. Pairs whose k+P
/// leaves the grid are dropped. Throws InvalidArgument for off-lattice P.
DiscretizedOperator build_povm_nr(const Outcome &outcome, const MomentumGrid &grid);

/// Mass-shell element: coefficient
///   exp(i k.X - i (k0(k) + k0(k+P)) xi0) dk^D / sqrt(2k0(k) 2k0(k+P) mu(k) mu(k+P))
/// on the cell-normalized basis, where mu is the exact mass-shell measure of
/// a grid cell. The point-evaluated kernel makes completeness approximate,
/// with an O(dk^2) defect.
DiscretizedOperator build_povm_rel(const Outcome &outcome, const MomentumGrid &grid, double xi0,
                                   const Conventions &conv, bool spectator = false);

/// int over the grid cell around `k` of d^D k / (2 k0).
double cell_measure(const std::vector<double> &k, double spacing, const Conventions &conv);

enum class PovmFamily { nonrelativistic, relativistic };

struct CompletenessReport {
    double defect_interior = 0.0;  // || sum w M - I || on pairs covered by the P lattice
    double defect_full = 0.0;      // the same on the whole two-particle grid basis
    size_t interior_size = 0;
    size_t boundary_size = 0;
    size_t outcomes = 0;
    double min_eigenvalue = 0.0;   // of the summed operator, interior
};

struct CompletenessOptions {
    double xi0 = 0.0;
    std::optional<size_t> deleted_outcome;
    int threads = 1;
};

/// Sums every lattice outcome (in outcome order) block by block in P and
/// returns operator-norm defects. Deterministic for any thread count.
CompletenessReport completeness_defect(PovmFamily family, const MomentumGrid &grid, const Conventions &conv,
                                       const CompletenessOptions &opts = {});

}  // namespace fieldport
