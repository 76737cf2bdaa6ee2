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

#include <string_view>

namespace fieldport::numerics {

/// Integer-order Bessel functions used by the closed forms of the
/// commutator function. Y is the Neumann function (often written N).
enum class BesselKind { J0, J1, Y0, Y1, K0, K1 };

/// Parses "J1", "Y1", "K1", ... Throws InvalidArgument on anything else.
BesselKind parse_bessel_kind(std::string_view name);
std::string_view to_string(BesselKind kind);

/// Requires arg > 0 (throws InvalidArgument); the branch at 0 is the
/// caller's business.
///
/// Small arguments use the power series (in extended precision for J and Y),
/// large arguments the Hankel asymptotic expansion truncated at its smallest
/// term. K beyond the series range is the exponentially convergent
/// trapezoidal rule on K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt.
double bessel(BesselKind kind, double arg);

inline double bessel_j1(double x) {
    return bessel(BesselKind::J1, x);
}
inline double bessel_y1(double x) {
    return bessel(BesselKind::Y1, x);
}
inline double bessel_k1(double x) {
    return bessel(BesselKind::K1, x);
}

}  // namespace fieldport::numerics
