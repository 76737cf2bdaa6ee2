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

#include "fieldport/wick.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "fieldport/error.hpp"

namespace fieldport {

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

PointLabel substitute(const std::map<PointLabel, PointLabel> &unify, const PointLabel &l) {
    auto it = unify.find(l);
    return it == unify.end() ? l : it->second;
}

std::vector<std::string> pair_key(const PairingTerm &t) {
    std::vector<std::string> key;
    for (const auto &p : t.pairs) {
        key.push_back(p.creator.display());
        key.push_back(p.annihilator.display());
    }
    return key;
}

}  // namespace

std::string PointLabel::display() const {
    std::string s = base;
    if (spatial_offset) {
        s += "+(";
        for (size_t i = 0; i < spatial_offset->size(); ++i) {
            if (i) {
                s += ",";
            }
            s += format_number((*spatial_offset)[i]);
        }
        s += ")";
    }
    if (time != 0.0) {
        s += "@" + format_number(time);
    }
    return s;
}

OperatorWord &OperatorWord::annihilate(PointLabel label) {
    factors.push_back({FieldKind::annihilation, std::move(label)});
    return *this;
}

OperatorWord &OperatorWord::create(PointLabel label) {
    factors.push_back({FieldKind::creation, std::move(label)});
    return *this;
}

std::vector<PointLabel> OperatorWord::annihilators() const {
    std::vector<PointLabel> out;
    for (const auto &f : factors) {
        if (f.kind == FieldKind::annihilation) {
            out.push_back(f.label);
        }
    }
    return out;
}

std::vector<PointLabel> OperatorWord::creators() const {
    std::vector<PointLabel> out;
    for (const auto &f : factors) {
        if (f.kind == FieldKind::creation) {
            out.push_back(f.label);
        }
    }
    return out;
}

bool OperatorWord::is_normal_form() const {
    bool seen_creator = false;
    for (const auto &f : factors) {
        if (f.kind == FieldKind::creation) {
            seen_creator = true;
        } else if (seen_creator) {
            return false;
        }
    }
    return true;
}

std::string to_string(TermTag tag) {
    switch (tag) {
        case TermTag::teleport_direct:
            return "teleport_direct";
        case TermTag::teleport_exchange:
            return "teleport_exchange";
        case TermTag::parasitic:
            return "parasitic";
        default:
            return "untagged";
    }
}

long WickExpansion::total_multiplicity() const {
    long s = 0;
    for (const auto &t : terms) {
        s += t.multiplicity;
    }
    return s;
}

WickExpansion vacuum_expectation_symbolic(const OperatorWord &word) {
    if (!word.is_normal_form()) {
        throw InvalidArgument(
            "word is not in normal form: every annihilation factor must stand to the left of every creation factor");
    }
    WickExpansion out;
    out.source_word = word;
    auto ann = word.annihilators();
    auto cre = word.creators();
    if (ann.size() != cre.size()) {
        return out;
    }
    std::vector<size_t> perm(cre.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        PairingTerm t;
        for (size_t i = 0; i < ann.size(); ++i) {
            t.pairs.push_back({cre[perm[i]], ann[i]});
        }
        std::sort(t.pairs.begin(), t.pairs.end());
        out.terms.push_back(std::move(t));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

WickExpansion collapse_repeated_labels(const WickExpansion &exp, const std::map<PointLabel, PointLabel> &unify) {
    WickExpansion out;
    out.source_word = exp.source_word;
    for (auto &f : out.source_word.factors) {
        f.label = substitute(unify, f.label);
    }
    std::map<std::vector<Contraction>, PairingTerm> merged;
    for (const auto &t : exp.terms) {
        PairingTerm u = t;
        for (auto &p : u.pairs) {
            p.creator = substitute(unify, p.creator);
            p.annihilator = substitute(unify, p.annihilator);
        }
        std::sort(u.pairs.begin(), u.pairs.end());
        auto [it, inserted] = merged.try_emplace(u.pairs, u);
        if (!inserted) {
            it->second.multiplicity += u.multiplicity;
            if (it->second.tag != u.tag) {
                it->second.tag = TermTag::untagged;
            }
        }
    }
    for (auto &[k, t] : merged) {
        out.terms.push_back(std::move(t));
    }
    return out;
}

WickExpansion classify_terms(const WickExpansion &exp, const Roles &roles) {
    if (roles.measurement.size() != 2) {
        throw InvalidArgument("roles: expected exactly two measurement slots (direct, exchange)");
    }
    std::vector<PointLabel> role_labels{roles.packet, roles.output};
    role_labels.insert(role_labels.end(), roles.epr.begin(), roles.epr.end());
    role_labels.insert(role_labels.end(), roles.measurement.begin(), roles.measurement.end());
    std::set<PointLabel> role_set;
    for (const auto &l : role_labels) {
        if (!role_set.insert(l).second) {
            throw InvalidArgument("roles: label " + l.display() + " is assigned more than one role");
        }
    }
    std::set<PointLabel> word_set;
    for (const auto &f : exp.source_word.factors) {
        word_set.insert(f.label);
    }
    if (role_set != word_set) {
        throw InvalidArgument("roles: role labels do not partition the word's labels");
    }
    WickExpansion out = exp;
    for (auto &t : out.terms) {
        t.tag = TermTag::untagged;
        for (const auto &p : t.pairs) {
            if (p.creator != roles.packet) {
                continue;
            }
            if (p.annihilator == roles.output) {
                t.tag = TermTag::parasitic;
            } else if (p.annihilator == roles.measurement[0]) {
                t.tag = TermTag::teleport_direct;
            } else if (p.annihilator == roles.measurement[1]) {
                t.tag = TermTag::teleport_exchange;
            }
        }
        if (t.tag == TermTag::untagged) {
            throw InvalidArgument("classify_terms: a term does not pair the packet creator with an annihilator");
        }
    }
    return out;
}

std::complex<double> evaluate_term(const PairingTerm &term, const ContractionFn &contraction) {
    std::complex<double> v = 1.0;
    for (const auto &p : term.pairs) {
        v *= contraction(p.creator, p.annihilator);
    }
    return v;
}

std::complex<double> evaluate(const WickExpansion &exp, const ContractionFn &contraction) {
    std::complex<double> s = 0.0;
    for (const auto &t : exp.terms) {
        s += double(t.multiplicity) * evaluate_term(t, contraction);
    }
    return s;
}

std::complex<double> discrete_contraction(const std::vector<std::complex<double>> &creator_modes,
                                          const std::vector<std::complex<double>> &annihilator_modes) {
    if (creator_modes.size() != annihilator_modes.size()) {
        throw InvalidArgument("mode vectors differ in length");
    }
    std::complex<double> s = 0.0;
    for (size_t j = 0; j < creator_modes.size(); ++j) {
        s += std::conj(annihilator_modes[j]) * creator_modes[j];
    }
    return s;
}

BruteForceResult brute_force_vev(const OperatorWord &word, int modes, int occupancy_cap,
                                 const std::map<PointLabel, std::vector<std::complex<double>>> &assignment) {
    if (modes < 1 || modes > 6) {
        throw InvalidArgument("brute_force_vev: modes must be in [1, 6]");
    }
    if (occupancy_cap < 1 || occupancy_cap > 4) {
        throw InvalidArgument("brute_force_vev: occupancy_cap must be in [1, 4]");
    }
    for (const auto &f : word.factors) {
        auto it = assignment.find(f.label);
        if (it == assignment.end()) {
            throw InvalidArgument("brute_force_vev: no mode amplitudes for label " + f.label.display());
        }
        if (static_cast<int>(it->second.size()) != modes) {
            throw InvalidArgument("brute_force_vev: wrong number of mode amplitudes for " + f.label.display());
        }
    }
    const int base = occupancy_cap + 1;
    std::vector<size_t> stride(modes);
    size_t dim = 1;
    for (int j = 0; j < modes; ++j) {
        stride[j] = dim;
        dim *= base;
    }
    std::vector<std::complex<double>> state(dim, 0.0), next(dim);
    state[0] = 1.0;
    BruteForceResult res;
    for (auto f = word.factors.rbegin(); f != word.factors.rend(); ++f) {
        const auto &u = assignment.at(f->label);
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t idx = 0; idx < dim; ++idx) {
            if (state[idx] == 0.0) {
                continue;
            }
            for (int j = 0; j < modes; ++j) {
                int n = static_cast<int>((idx / stride[j]) % base);
                if (f->kind == FieldKind::creation) {
                    std::complex<double> w = u[j] * std::sqrt(double(n + 1)) * state[idx];
                    if (n == occupancy_cap) {
                        if (w != 0.0) {
                            res.reliable = false;
                            res.overflow_weight = std::max(res.overflow_weight, std::abs(w));
                        }
                        continue;
                    }
                    next[idx + stride[j]] += w;
                } else if (n > 0) {
                    next[idx - stride[j]] += std::conj(u[j]) * std::sqrt(double(n)) * state[idx];
                }
            }
        }
        state.swap(next);
    }
    res.value = state[0];
    return res;
}

nlohmann::json to_json(const WickExpansion &exp) {
    std::vector<const PairingTerm *> order;
    for (const auto &t : exp.terms) {
        order.push_back(&t);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const PairingTerm *a, const PairingTerm *b) { return pair_key(*a) < pair_key(*b); });
    nlohmann::json terms = nlohmann::json::array();
    for (const PairingTerm *t : order) {
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto &p : t->pairs) {
            pairs.push_back({p.creator.display(), p.annihilator.display()});
        }
        terms.push_back({{"pairs", pairs}, {"multiplicity", t->multiplicity}, {"tag", to_string(t->tag)}});
    }
    return {{"terms", terms}};
}

}  // namespace fieldport
