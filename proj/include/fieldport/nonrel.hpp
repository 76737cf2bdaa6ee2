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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fieldport/conventions.hpp"
#include "fieldport/grid.hpp"
#include "fieldport/wick.hpp"

namespace fieldport {

// ---- finite-dimensional teleportation ----

struct QuditState {
    int dim = 2;
    Eigen::VectorXcd vector;

    /// Throws InvalidArgument unless 2 <= dim <= 16 and the norm is 1
    /// within 1e-12.
    void validate() const;
};

/// Haar-random unit vector from a seeded mt19937_64 stream.
QuditState random_qudit(int dim, std::uint64_t seed);

struct BellOutcome {
    int index = 0;  // a * d + b
    int phase = 0;  // a
    int shift = 0;  // b
    double probability = 0.0;
    Eigen::VectorXcd post_state;   // state of the output particle, normalized
    Eigen::MatrixXcd correction;   // U with U post = psi up to a phase
    double fidelity = 0.0;         // |<psi| U post>|^2
};

/// Joint measurement of the input and one half of the pair in the basis
/// |B_ab> = d^-1/2 sum_j w^{aj} |j>|j+b>, w = exp(2 pi i / d), on the
/// state psi (x) d^-1/2 sum_j |j>|j>. The correction is
/// U_ab = sum_j w^{aj} |j><j+b|.
std::vector<BellOutcome> teleport_qudit(const QuditState &psi);

struct TeleportStats {
    int dim = 0;
    int trials = 0;
    std::vector<double> mean_probability;  // per outcome index
    double max_probability_deviation = 0.0;  // from 1/d^2, over all trials
    double min_fidelity = 1.0;
    double mean_fidelity = 0.0;
};

/// Teleports `trials` random states drawn from `seed` (trial i uses
/// seed + i).
TeleportStats teleport_trials(int dim, int trials, std::uint64_t seed);

// ---- continuum limit on a lattice ----

/// Packet sampled on the position ring dual to `grid` (spacing
/// 2 pi / (n dk), periodic in every axis).
struct NRPacket {
    MomentumGrid grid;
    std::vector<std::complex<double>> values;  // flattened like the grid

    /// exp(-|x - center|^2 / (4 width^2) + i k.x), normalized to
    /// sum |f|^2 cell = 1 on the ring.
    static NRPacket gaussian(const MomentumGrid &grid, std::vector<double> center, double width,
                             std::vector<double> k);

    double norm2() const;  // sum |f|^2 * cell
    /// Value at a ring point; coordinates are reduced modulo the period.
    /// Throws InvalidArgument for off-ring points.
    std::complex<double> at(const std::vector<double> &x) const;
    std::vector<double> position(size_t index) const;
};

/// One term of the replacement-rule limit. Its lattice value at output
/// point x is
///   displaced:  f(x - X) exp(i P.(x - X)) exp(i extra_phase_X * P.X)
///   otherwise:  f(x) delta(X) delta(P)
/// with deltas realized as Kronecker deltas over the lattice cell.
struct NRTerm {
    TermTag tag = TermTag::untagged;
    int weight = 0;
    bool displaced = true;
    int extra_phase_X = 0;
    std::string formula;
};

struct NRAmplitude {
    std::vector<NRTerm> terms;  // direct, exchange, parasitic
};

/// Replaces every contraction by a spatial delta. Expects the collapsed,
/// classified ideal-pair expansion (three tagged terms). Weights carry the
/// printed pattern 2, 2, 4. Throws InvalidArgument for other inputs.
NRAmplitude nr_limit_expansion(const WickExpansion &exp);

/// f(x - X) exp(i P.(x - X)) on the ring.
std::complex<double> nr_teleport_amplitude(const NRPacket &f, const Outcome &outcome, const std::vector<double> &x);

/// Lattice value of one term, as a sum over the source point x' with the
/// delta as a Kronecker delta divided by the cell.
std::complex<double> nr_term_value(const NRTerm &term, const NRPacket &f, const Outcome &outcome,
                                   const std::vector<double> &x);

/// sum over terms of weight * value (terms with include[i] false skipped;
/// empty `include` keeps all).
std::complex<double> nr_total_amplitude(const NRAmplitude &amp, const NRPacket &f, const Outcome &outcome,
                                        const std::vector<double> &x, const std::vector<bool> &include = {});

/// Per outcome (in grid outcome order): sum_x |f(x - X) exp(...)|^2 cell
/// times the outcome weight dX dP / (2 pi)^D.
std::vector<double> nr_outcome_probability(const NRPacket &f);

/// Overlap of the ideal pair with total momentum q (on the lattice) with the
/// measurement state of outcome (X, P).
std::complex<double> nr_epr_overlap(const std::vector<double> &q, const Outcome &outcome, const MomentumGrid &grid);

}  // namespace fieldport
