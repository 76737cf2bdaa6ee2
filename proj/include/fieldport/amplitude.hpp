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
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "fieldport/conventions.hpp"
#include "fieldport/grid.hpp"
#include "fieldport/states.hpp"
#include "fieldport/wick.hpp"

namespace fieldport {

/// Teleportation scenario. The packet shape f is given at packet.t0, the
/// pair is created at epr.pair_time, the joint measurement happens at xi0
/// and the output is read at t_out. Only 1+1 dimensions are supported.
///
/// The regularized pair enters through the position profile
///   w(x1) = (2 pi)^-1 int dK G(K) exp(-i K x1),
///   G(K) = epr.amplitude * exp(-(K - q)^2 / (4 sigma_epr^2)),
/// placed at coincident points x1 = x2.
struct Scenario {
    GaussianPacket packet;
    EPRFamily epr;
    double xi0 = 1.0;
    double t_out = 1.5;
    Conventions conv;

    /// Throws InvalidArgument unless D = 1, sigma_epr > 0 and every time is
    /// finite.
    void validate() const;
};

/// Labels of the six-operator word: annihilators xi, xi - X (offset -1) and
/// the output x; creators x1, x2 (the pair) and the packet point x'.
struct AmplitudeLabels {
    PointLabel xi, xi_shift, out, x1, x2, packet;
};
AmplitudeLabels amplitude_labels(const Scenario &s);

/// Expands the vacuum average of the word, collapses x2 -> x1 when
/// `ideal_pair` is set and tags every term. The collapsed expansion has three
/// terms of multiplicity 2; the distinct-label one has six of multiplicity 1.
WickExpansion symbolic_amplitude(const Scenario &s, bool ideal_pair = true);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    bool operator==(const Rational &) const = default;
};
Rational make_rational(std::int64_t num, std::int64_t den);

/// Weight of a term in the amplitude sum: its Wick multiplicity, doubled for
/// parasitic terms (the intra-pair exchange factor of the printed amplitude).
int amplitude_weight(const PairingTerm &term);

/// Weighted share of parasitic terms. With `printed_weights` the
/// amplitude_weight values are used, otherwise the Wick multiplicities.
Rational parasitic_fraction(const WickExpansion &exp, bool printed_weights = true);

struct TermValue {
    std::complex<double> value;
    double est_error = 0.0;
};

/// Value of one tagged term: the product of D+(creator - annihilator)
/// factors integrated over x', x1 and xi with f(x'), w(x1) and exp(i P xi),
/// every spatial integral done by quadrature on the closed-form kernel.
TermValue term_value_position(const PairingTerm &term, const Scenario &s, const Outcome &outcome, double x);

/// The same term with every D+ written as its mass-shell integral and the
/// spatial integrals done analytically: a two-dimensional momentum
/// quadrature for the teleport terms and a product of one-dimensional ones
/// for the parasitic term.
TermValue term_value_momentum(const PairingTerm &term, const Scenario &s, const Outcome &outcome, double x);

struct BreakdownTerm {
    TermTag tag = TermTag::untagged;
    int weight = 0;
    std::complex<double> value;
    double est_error = 0.0;
};

struct AmplitudeBreakdown {
    std::vector<BreakdownTerm> terms;  // direct, exchange, parasitic
    std::complex<double> total;
    double est_error = 0.0;
    bool partial = false;  // a term failed and was left out
};

struct AmplitudeOptions {
    bool include_direct = true;
    bool include_exchange = true;
    bool include_parasitic = true;
};

/// sum of weight * value over the ideal-pair terms, momentum route.
AmplitudeBreakdown total_amplitude(const Scenario &s, const Outcome &outcome, double x,
                                   const AmplitudeOptions &opts = {});

/// sum_x |total|^2 dx over a uniform x grid times `outcome_cell`
/// (dX dP / (2 pi)^D of the lattice). Throws CoverageError when an end of the
/// grid carries more than 1e-6 of the peak density.
double outcome_probability_density(const Scenario &s, const Outcome &outcome, const std::vector<double> &x_grid,
                                   double outcome_cell, const AmplitudeOptions &opts = {});

/// Term-by-term comparison of the printed amplitude with the expansion:
/// for every printed factor, whether it pairs a creator with an
/// annihilator, whether its argument order is creator - annihilator or
/// reflected, and which derived contraction it corresponds to.
nlohmann::json conformance_report(const Scenario &s);

}  // namespace fieldport
