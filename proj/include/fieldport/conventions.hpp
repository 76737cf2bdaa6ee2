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

#include <cmath>
#include <numbers>
#include <optional>

namespace fieldport {

/// Units, metric and normalization shared by every module.
///
/// Natural units (hbar = c = 1), lengths in units of 1/m. The metric is
/// (+,-,-,-), so k.x = k0 x0 - k.x. Every contraction in a run is evaluated as
///
///     contraction_norm * integral d^D k / (2 k0) exp(-i k.(x_c - x_a))
///
/// over the positive mass shell, with one global `contraction_norm`.
struct Conventions {
    int spatial_dims = 3;
    double mass = 1.0;
    double contraction_norm = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi);
    /// Ratio (closed form)/(quadrature) of the commutator function, measured
    /// once per run by `calibrated`. 1 until measured.
    double closed_form_calibration = 1.0;

    /// k0 on the mass shell for |k|^2 = k2.
    double energy(double k2) const {
        return std::sqrt(k2 + mass * mass);
    }
};

/// m = 1, D = 3, C = (2 pi)^-D. Overrides are validated: mass must be
/// positive and finite, dims must be 1 or 3. Throws InvalidArgument.
Conventions default_conventions(std::optional<int> spatial_dims = std::nullopt,
                                std::optional<double> mass = std::nullopt);

/// Throws InvalidArgument when the invariants do not hold.
void validate(const Conventions &conv);

}  // namespace fieldport
