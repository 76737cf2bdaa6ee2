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

#include <stdexcept>
#include <string>

namespace fieldport {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Bad input: violated precondition, malformed word, invalid configuration.
class InvalidArgument : public Error {
   public:
    using Error::Error;
};

/// Evaluation point inside the light-cone guard band (or at a coincident point).
class LightConeGuard : public Error {
   public:
    LightConeGuard(const std::string &what, double distance_to_cone)
        : Error(what), distance_to_cone(distance_to_cone) {
    }
    double distance_to_cone;
};

/// A quadrature or series failed to converge within its budget.
class ConvergenceFailure : public Error {
   public:
    ConvergenceFailure(const std::string &what, double best_estimate_abs, double est_error)
        : Error(what), best_estimate_abs(best_estimate_abs), est_error(est_error) {
    }
    double best_estimate_abs;
    double est_error;
};

/// A spatial grid does not cover the support of a density.
class CoverageError : public Error {
   public:
    CoverageError(const std::string &what, double boundary_ratio) : Error(what), boundary_ratio(boundary_ratio) {
    }
    double boundary_ratio;  // largest boundary value over the peak
};

}  // namespace fieldport
