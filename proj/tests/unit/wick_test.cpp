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

#include <gtest/gtest.h>

#include <random>

#include "fieldport/error.hpp"

using namespace fieldport;
using cd = std::complex<double>;

namespace {

PointLabel L(std::string base, double time = 0.0) {
    return PointLabel{std::move(base), std::nullopt, time};
}

struct Teleport {
    PointLabel packet = L("x'", 0.2);
    PointLabel x1 = L("x1");
    PointLabel x2 = L("x2");
    PointLabel xi = L("xi", 1.0);
    PointLabel xi_shift = PointLabel{"xi", std::vector<double>{-0.7}, 1.0};
    PointLabel out = L("x", 1.5);

    OperatorWord word() const {
        OperatorWord w;
        w.annihilate(xi).annihilate(xi_shift).annihilate(out).create(x1).create(x2).create(packet);
        return w;
    }
};

std::vector<cd> random_modes(std::mt19937_64 &rng, int modes) {
    std::normal_distribution<double> g;
    std::vector<cd> u(modes);
    for (auto &z : u) {
        z = cd(g(rng), g(rng)) * 0.6;
    }
    return u;
}

}  // namespace

TEST(Wick, SinglePair) {
    OperatorWord w;
    w.annihilate(L("y")).create(L("x"));
    auto e = vacuum_expectation_symbolic(w);
    ASSERT_EQ(e.terms.size(), 1u);
    EXPECT_EQ(e.terms[0].pairs[0].creator, L("x"));
    EXPECT_EQ(e.terms[0].pairs[0].annihilator, L("y"));
    EXPECT_EQ(e.terms[0].multiplicity, 1);
}

TEST(Wick, NumberMismatchIsEmpty) {
    OperatorWord w;
    w.annihilate(L("a")).create(L("b")).create(L("c"));
    EXPECT_TRUE(vacuum_expectation_symbolic(w).terms.empty());
}

TEST(Wick, EmptyWordHasOneEmptyPairing) {
    auto e = vacuum_expectation_symbolic(OperatorWord{});
    ASSERT_EQ(e.terms.size(), 1u);
    EXPECT_TRUE(e.terms[0].pairs.empty());
}

TEST(Wick, RejectsNonNormalForm) {
    OperatorWord w;
    w.create(L("a")).annihilate(L("b"));
    EXPECT_THROW(vacuum_expectation_symbolic(w), InvalidArgument);
}

TEST(Wick, TeleportWordHasSixMatchings) {
    Teleport T;
    auto e = vacuum_expectation_symbolic(T.word());
    EXPECT_EQ(e.terms.size(), 6u);
    for (const auto &t : e.terms) {
        EXPECT_EQ(t.multiplicity, 1);
        EXPECT_EQ(t.pairs.size(), 3u);
    }
    EXPECT_EQ(e.total_multiplicity(), 6);
}

TEST(Wick, IdealEprCollapse) {
    Teleport T;
    auto e = vacuum_expectation_symbolic(T.word());
    auto c = collapse_repeated_labels(e, {{T.x2, T.x1}});
    ASSERT_EQ(c.terms.size(), 3u);
    for (const auto &t : c.terms) {
        EXPECT_EQ(t.multiplicity, 2);
    }
    EXPECT_EQ(c.total_multiplicity(), 6);

    Roles roles{T.packet, {T.x1}, T.out, {T.xi, T.xi_shift}};
    auto tagged = classify_terms(c, roles);
    std::map<TermTag, int> count;
    for (const auto &t : tagged.terms) {
        count[t.tag] += t.multiplicity;
    }
    EXPECT_EQ(count[TermTag::teleport_direct], 2);
    EXPECT_EQ(count[TermTag::teleport_exchange], 2);
    EXPECT_EQ(count[TermTag::parasitic], 2);
}

TEST(Wick, CollapseOfRepeatedWordLabels) {
    Teleport T;
    OperatorWord w;
    w.annihilate(T.xi).annihilate(T.xi_shift).annihilate(T.out).create(T.x1).create(T.x1).create(T.packet);
    auto c = collapse_repeated_labels(vacuum_expectation_symbolic(w));
    EXPECT_EQ(c.terms.size(), 3u);
    EXPECT_EQ(c.total_multiplicity(), 6);
}

TEST(Wick, CollapseWithoutRepeatsIsIdentity) {
    Teleport T;
    auto e = vacuum_expectation_symbolic(T.word());
    auto c = collapse_repeated_labels(e);
    EXPECT_EQ(c.terms.size(), 6u);
    EXPECT_EQ(to_json(c), to_json(e));
    EXPECT_TRUE(collapse_repeated_labels(WickExpansion{}).terms.empty());
}

TEST(Wick, ClassificationIsTotal) {
    Teleport T;
    auto e = classify_terms(vacuum_expectation_symbolic(T.word()), {T.packet, {T.x1, T.x2}, T.out, {T.xi, T.xi_shift}});
    std::map<TermTag, int> count;
    for (const auto &t : e.terms) {
        EXPECT_NE(t.tag, TermTag::untagged);
        count[t.tag]++;
    }
    EXPECT_EQ(count[TermTag::teleport_direct], 2);
    EXPECT_EQ(count[TermTag::teleport_exchange], 2);
    EXPECT_EQ(count[TermTag::parasitic], 2);
    for (const auto &t : e.terms) {
        for (const auto &p : t.pairs) {
            if (p.creator == T.packet && p.annihilator == T.out) {
                EXPECT_EQ(t.tag, TermTag::parasitic);
            }
            if (p.creator == T.packet && p.annihilator == T.xi) {
                EXPECT_EQ(t.tag, TermTag::teleport_direct);
            }
            if (p.creator == T.packet && p.annihilator == T.xi_shift) {
                EXPECT_EQ(t.tag, TermTag::teleport_exchange);
            }
        }
    }
}

TEST(Wick, ClassificationRejectsBadRoles) {
    Teleport T;
    auto e = vacuum_expectation_symbolic(T.word());
    EXPECT_THROW(classify_terms(e, {T.packet, {T.x1}, T.out, {T.xi, T.xi_shift}}), InvalidArgument);
    EXPECT_THROW(classify_terms(e, {T.packet, {T.x1, T.x2, T.packet}, T.out, {T.xi, T.xi_shift}}), InvalidArgument);
    EXPECT_THROW(classify_terms(e, {T.packet, {T.x1, T.x2}, T.out, {T.xi}}), InvalidArgument);
}

TEST(Wick, JsonOrderIsDeterministic) {
    Teleport T;
    auto e = vacuum_expectation_symbolic(T.word());
    auto shuffled = e;
    std::mt19937_64 rng(5);
    std::shuffle(shuffled.terms.begin(), shuffled.terms.end(), rng);
    EXPECT_EQ(to_json(e).dump(), to_json(shuffled).dump());
    auto j = to_json(e);
    ASSERT_EQ(j["terms"].size(), 6u);
    EXPECT_EQ(j["terms"][0]["pairs"][0].size(), 2u);
    EXPECT_EQ(j["terms"][0]["tag"], "untagged");
}

TEST(BruteForce, SingleModeExamples) {
    std::map<PointLabel, std::vector<cd>> a{{L("a"), {1.0}}};
    OperatorWord w1;
    w1.annihilate(L("a")).create(L("a"));
    EXPECT_NEAR(std::abs(brute_force_vev(w1, 1, 2, a).value - 1.0), 0.0, 1e-15);
    OperatorWord w2;
    w2.annihilate(L("a")).annihilate(L("a")).create(L("a")).create(L("a"));
    auto r = brute_force_vev(w2, 1, 2, a);
    EXPECT_NEAR(std::abs(r.value - 2.0), 0.0, 1e-14);
    EXPECT_TRUE(r.reliable);
    auto clipped = brute_force_vev(w2, 1, 1, a);
    EXPECT_FALSE(clipped.reliable);
    EXPECT_GT(clipped.overflow_weight, 0.0);
}

TEST(BruteForce, RejectsOutOfScale) {
    std::map<PointLabel, std::vector<cd>> a{{L("a"), std::vector<cd>(7, 1.0)}};
    OperatorWord w;
    w.annihilate(L("a")).create(L("a"));
    EXPECT_THROW(brute_force_vev(w, 7, 2, a), InvalidArgument);
    EXPECT_THROW(brute_force_vev(w, 1, 5, {{L("a"), {1.0}}}), InvalidArgument);
    EXPECT_THROW(brute_force_vev(w, 2, 2, {{L("a"), {1.0}}}), InvalidArgument);
    EXPECT_THROW(brute_force_vev(w, 1, 2, {{L("b"), {1.0}}}), InvalidArgument);
}

TEST(BruteForce, TeleportWordMatchesExpansion) {
    Teleport T;
    std::mt19937_64 rng(17);
    std::map<PointLabel, std::vector<cd>> modes;
    for (const auto &l : {T.packet, T.x1, T.x2, T.xi, T.xi_shift, T.out}) {
        modes[l] = random_modes(rng, 3);
    }
    auto r = brute_force_vev(T.word(), 3, 3, modes);
    ASSERT_TRUE(r.reliable);
    auto symbolic = evaluate(vacuum_expectation_symbolic(T.word()), [&](const PointLabel &c, const PointLabel &a) {
        return discrete_contraction(modes.at(c), modes.at(a));
    });
    EXPECT_LE(std::abs(r.value - symbolic), 1e-10 * std::abs(symbolic));
}

TEST(WickProperty, SymbolicMatchesBruteForceOnRandomWords) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 1 + trial % 4;
        int modes = 1 + static_cast<int>(rng() % 4);
        int distinct = 1 + static_cast<int>(rng() % (2 * n));
        std::vector<PointLabel> pool;
        std::map<PointLabel, std::vector<cd>> assign;
        for (int i = 0; i < distinct; ++i) {
            pool.push_back(L("p" + std::to_string(i)));
            assign[pool.back()] = random_modes(rng, modes);
        }
        OperatorWord w;
        for (int i = 0; i < n; ++i) {
            w.annihilate(pool[rng() % distinct]);
        }
        for (int i = 0; i < n; ++i) {
            w.create(pool[rng() % distinct]);
        }
        auto e = vacuum_expectation_symbolic(w);
        long fact = 1;
        for (int i = 2; i <= n; ++i) {
            fact *= i;
        }
        EXPECT_EQ(e.total_multiplicity(), fact);
        auto c = collapse_repeated_labels(e);
        EXPECT_EQ(c.total_multiplicity(), fact);
        auto fn = [&](const PointLabel &a, const PointLabel &b) { return discrete_contraction(assign.at(a), assign.at(b)); };
        cd sym = evaluate(e, fn);
        EXPECT_LE(std::abs(evaluate(c, fn) - sym), 1e-12 * (1.0 + std::abs(sym)));
        auto r = brute_force_vev(w, modes, std::min(4, n), assign);
        ASSERT_TRUE(r.reliable);
        EXPECT_LE(std::abs(r.value - sym), 1e-10 * std::max(std::abs(sym), 1e-3)) << trial;
    }
}
