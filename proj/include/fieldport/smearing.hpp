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

#include "fieldport/conventions.hpp"
#include "fieldport/propagator.hpp"
#include "fieldport/states.hpp"

namespace fieldport {

/// -i C int d^D k / (2 k0) conj(f(k)) g(k) exp(i k0 (f.t0 - g.t0)):
/// the transition amplitude between two packets over the mass shell.
cdouble smeared_two_point(const GaussianPacket &f, const GaussianPacket &g, const Conventions &conv);

/// The same quantity as a position-space double integral,
/// int dy dx conj(F(y)) D+(g.t0 - f.t0, x - y) G(x), with F and G the
/// packets' position shapes at their reference times and D+ in closed form.
/// spatial_dims must be 1.
cdouble smeared_two_point_position(const GaussianPacket &f, const GaussianPacket &g, const Conventions &conv);

}  // namespace fieldport
