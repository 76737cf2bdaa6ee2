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

#include <cstddef>
#include <vector>

namespace fieldport {

/// Measurement result: X is the position-sum coordinate, P the momentum
/// difference.
struct Outcome {
    std::vector<double> X;
    std::vector<double> P;
};

/// Symmetric momentum grid with n (odd) points per axis and spacing dk,
/// k_i = (i - (n-1)/2) dk. Points of a D-dimensional grid are flattened with
/// the first axis fastest.
struct MomentumGrid {
    int dims = 1;
    int n_points = 21;
    double spacing = 0.25;

    /// Throws InvalidArgument unless dims in {1, 3}, n odd and >= 1, spacing > 0.
    void validate() const;

    double cutoff() const {
        return 0.5 * n_points * spacing;
    }
    size_t size() const;
    /// Axis coordinate of index i (0 <= i < n).
    double axis_value(int i) const {
        return (i - (n_points - 1) / 2) * spacing;
    }
    std::vector<int> unflatten(size_t index) const;
    size_t flatten(const std::vector<int> &axis_index) const;
    std::vector<double> point(size_t index) const;

    /// Spacing of the X lattice dual to the grid: 2 pi / (n dk).
    double dual_spacing() const;
    double cell_volume() const;
    double dual_cell_volume() const;

    /// Outcome lattice: X on the dual lattice, P on the momentum lattice,
    /// both with n points per axis centred on 0. Enumerated with X fastest.
    size_t outcome_count() const {
        return size() * size();
    }
    Outcome outcome(size_t index) const;
    /// Integer lattice coordinates of the outcome's P (per axis, in
    /// [-(n-1)/2, (n-1)/2]).
    std::vector<int> p_steps(size_t outcome_index) const;
    /// Weight dX dP / (2 pi)^D of one lattice outcome = n^-D.
    double outcome_weight() const;
};

}  // namespace fieldport
