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

#include "fieldport/grid.hpp"

#include <cmath>
#include <numbers>

#include "fieldport/error.hpp"

namespace fieldport {

void MomentumGrid::validate() const {
    if (dims != 1 && dims != 3) {
        throw InvalidArgument("grid dims must be 1 or 3");
    }
    if (n_points < 1 || n_points % 2 == 0) {
        throw InvalidArgument("grid n_points must be odd and positive");
    }
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw InvalidArgument("grid spacing must be positive");
    }
}

size_t MomentumGrid::size() const {
    size_t s = 1;
    for (int d = 0; d < dims; ++d) {
        s *= static_cast<size_t>(n_points);
    }
    return s;
}

std::vector<int> MomentumGrid::unflatten(size_t index) const {
    std::vector<int> idx(dims);
    for (int d = 0; d < dims; ++d) {
        idx[d] = static_cast<int>(index % n_points);
        index /= n_points;
    }
    return idx;
}

size_t MomentumGrid::flatten(const std::vector<int> &axis_index) const {
    size_t index = 0;
    for (int d = dims - 1; d >= 0; --d) {
        index = index * n_points + static_cast<size_t>(axis_index[d]);
    }
    return index;
}

std::vector<double> MomentumGrid::point(size_t index) const {
    auto idx = unflatten(index);
    std::vector<double> k(dims);
    for (int d = 0; d < dims; ++d) {
        k[d] = axis_value(idx[d]);
    }
    return k;
}

double MomentumGrid::dual_spacing() const {
    return 2.0 * std::numbers::pi / (n_points * spacing);
}

double MomentumGrid::cell_volume() const {
    return std::pow(spacing, dims);
}

double MomentumGrid::dual_cell_volume() const {
    return std::pow(dual_spacing(), dims);
}

Outcome MomentumGrid::outcome(size_t index) const {
    size_t xi = index % size();
    size_t pi = index / size();
    Outcome o;
    o.X = point(xi);
    for (double &c : o.X) {
        c *= dual_spacing() / spacing;
    }
    o.P = point(pi);
    return o;
}

std::vector<int> MomentumGrid::p_steps(size_t outcome_index) const {
    auto idx = unflatten(outcome_index / size());
    for (int &i : idx) {
        i -= (n_points - 1) / 2;
    }
    return idx;
}

double MomentumGrid::outcome_weight() const {
    return std::pow(1.0 / n_points, dims);
}

}  // namespace fieldport
