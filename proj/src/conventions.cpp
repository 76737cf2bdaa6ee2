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

#include "fieldport/conventions.hpp"

#include <string>

#include "fieldport/error.hpp"

namespace fieldport {

void validate(const Conventions &conv) {
    if (conv.spatial_dims != 1 && conv.spatial_dims != 3) {
        throw InvalidArgument("spatial_dims must be 1 or 3, got " + std::to_string(conv.spatial_dims));
    }
    if (!(conv.mass > 0.0) || !std::isfinite(conv.mass)) {
        throw InvalidArgument("mass must be positive and finite");
    }
    if (!(conv.contraction_norm > 0.0) || !std::isfinite(conv.contraction_norm)) {
        throw InvalidArgument("contraction_norm must be positive and finite");
    }
    if (!std::isfinite(conv.closed_form_calibration) || conv.closed_form_calibration == 0.0) {
        throw InvalidArgument("closed_form_calibration must be finite and nonzero");
    }
}

Conventions default_conventions(std::optional<int> spatial_dims, std::optional<double> mass) {
    Conventions conv;
    if (spatial_dims) {
        conv.spatial_dims = *spatial_dims;
    }
    if (mass) {
        conv.mass = *mass;
    }
    conv.contraction_norm = std::pow(2.0 * std::numbers::pi, -conv.spatial_dims);
    validate(conv);
    return conv;
}

}  // namespace fieldport
