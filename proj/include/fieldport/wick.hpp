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
#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fieldport {

/// Argument of a field operator: a named point, optionally shifted by a
/// spatial vector, at a fixed time.
struct PointLabel {
    std::string base;
    std::optional<std::vector<double>> spatial_offset;
    double time = 0.0;

    auto operator<=>(const PointLabel &) const = default;
    bool operator==(const PointLabel &) const = default;

    /// "xi", "xi+(-0.5)", "x@1.5"; unique for distinct labels up to the
    /// printed precision.
    std::string display() const;
};

enum class FieldKind { annihilation, creation };

struct OperatorFactor {
    FieldKind kind;
    PointLabel label;
};

/// Ordered product; the leftmost factor acts last, vacuum on both sides.
struct OperatorWord {
    std::vector<OperatorFactor> factors;

    OperatorWord &annihilate(PointLabel label);
    OperatorWord &create(PointLabel label);
    std::vector<PointLabel> annihilators() const;
    std::vector<PointLabel> creators() const;
    bool is_normal_form() const;
};

enum class TermTag { untagged, teleport_direct, teleport_exchange, parasitic };
std::string to_string(TermTag tag);

struct Contraction {
    PointLabel creator;
    PointLabel annihilator;

    auto operator<=>(const Contraction &) const = default;
    bool operator==(const Contraction &) const = default;
};

/// A perfect matching between creators and annihilators. `pairs` is kept
/// sorted so equal matchings compare equal.
struct PairingTerm {
    std::vector<Contraction> pairs;
    int multiplicity = 1;
    TermTag tag = TermTag::untagged;
};

struct WickExpansion {
    std::vector<PairingTerm> terms;
    OperatorWord source_word;

    long total_multiplicity() const;
};

/// All perfect matchings of a (phi-)^m (phi+)^n word; empty when m != n.
/// Throws InvalidArgument for words not in that normal form.
WickExpansion vacuum_expectation_symbolic(const OperatorWord &word);

/// Merges terms with identical pair sets, adding multiplicities. Labels in
/// `unify` are replaced by their image first (e.g. x2 -> x1 for an ideal
/// EPR source). Output order is deterministic.
WickExpansion collapse_repeated_labels(const WickExpansion &exp, const std::map<PointLabel, PointLabel> &unify = {});

struct Roles {
    PointLabel packet;                        // creator of the state to be teleported
    std::vector<PointLabel> epr;              // EPR creators
    PointLabel output;                        // free output annihilator
    std::vector<PointLabel> measurement;      // {direct slot, exchange slot}
};

/// Tags every term: parasitic when the packet creator meets the output
/// annihilator, teleport_direct / teleport_exchange when it meets the first
/// / second measurement slot. Throws InvalidArgument when the roles do not
/// partition the word's labels or a term cannot be tagged.
WickExpansion classify_terms(const WickExpansion &exp, const Roles &roles);

using ContractionFn = std::function<std::complex<double>(const PointLabel &creator, const PointLabel &annihilator)>;

/// sum over terms of multiplicity * product of contractions.
std::complex<double> evaluate(const WickExpansion &exp, const ContractionFn &contraction);

/// Product of contractions of one term (multiplicity not included).
std::complex<double> evaluate_term(const PairingTerm &term, const ContractionFn &contraction);

struct BruteForceResult {
    std::complex<double> value;
    bool reliable = true;          // false when a creation step overflowed the cap
    double overflow_weight = 0.0;  // largest amplitude dropped by truncation
};

/// <0| word |0> on a truncated Fock space of `modes` oscillators with at
/// most `occupancy_cap` quanta each. phi+(l) = sum_j u_l[j] a_j^dagger and
/// phi-(l) = sum_j conj(u_l[j]) a_j, with u_l = assignment.at(l).
/// Requires modes <= 6 and occupancy_cap <= 4.
BruteForceResult brute_force_vev(const OperatorWord &word, int modes, int occupancy_cap,
                                 const std::map<PointLabel, std::vector<std::complex<double>>> &assignment);

/// <0| phi-(a) phi+(c) |0> for the discrete mode expansion above.
std::complex<double> discrete_contraction(const std::vector<std::complex<double>> &creator_modes,
                                          const std::vector<std::complex<double>> &annihilator_modes);

/// {"terms": [{"pairs": [[c, a], ...], "multiplicity": n, "tag": "..."}]},
/// terms ordered lexicographically on their pair lists.
nlohmann::json to_json(const WickExpansion &exp);

}  // namespace fieldport
