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

#include "fieldport/bessel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "fieldport/error.hpp"
#include "gtest/gtest.h"

using namespace fieldport;
using namespace fieldport::numerics;

namespace {

struct Row {
    std::string kind;
    double arg;
    double value;
};

std::vector<Row> load_reference() {
    std::ifstream in(std::string(FIELDPORT_DATA_DIR) + "/bessel_reference.csv");
    std::vector<Row> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string kind, arg, value;
        std::getline(ss, kind, ',');
        std::getline(ss, arg, ',');
        std::getline(ss, value, ',');
        rows.push_back({kind, std::stod(arg), std::stod(value)});
    }
    return rows;
}

}  // namespace

TEST(Bessel, matches_arbitrary_precision_reference_table) {
    auto rows = load_reference();
    ASSERT_GE(rows.size(), 25u);
    for (const auto &row : rows) {
        double got = bessel(parse_bessel_kind(row.kind), row.arg);
        EXPECT_LE(std::abs(got - row.value), 1e-12 * std::abs(row.value)) << row.kind << "(" << row.arg << ")";
    }
}

TEST(Bessel, small_argument_limits) {
    EXPECT_NEAR(bessel_j1(1e-8) / 1e-8, 0.5, 1e-14);
    EXPECT_NEAR(bessel_k1(1e-8) * 1e-8, 1.0, 1e-12);
}

TEST(Bessel, continuity_across_crossovers) {
    for (double x : {2.0, 17.0}) {
        for (auto kind : {BesselKind::J1, BesselKind::Y1, BesselKind::K1, BesselKind::J0, BesselKind::Y0}) {
            // One-ulp-scale steps either side; the function moves by at most |f'| * 2e-12 x.
            double lo = bessel(kind, x * (1 - 1e-12));
            double hi = bessel(kind, x * (1 + 1e-12));
            EXPECT_NEAR(lo, hi, 1e-11 * x + 1e-14) << to_string(kind) << " at " << x;
        }
    }
}

TEST(Bessel, agrees_with_standard_library_special_functions) {
    for (double x = 0.05; x < 60.0; x *= 1.37) {
        EXPECT_NEAR(bessel_j1(x), std::cyl_bessel_j(1.0, x), 1e-11) << x;
        EXPECT_NEAR(bessel_y1(x), std::cyl_neumann(1.0, x), 1e-10 * std::max(1.0, std::abs(bessel_y1(x)))) << x;
        EXPECT_NEAR(bessel_k1(x), std::cyl_bessel_k(1.0, x), 1e-11 * std::cyl_bessel_k(1.0, x)) << x;
    }
}

TEST(Bessel, wronskian_identity) {
    // J1 Y0 - J0 Y1 = 2/(pi x)
    for (double x : {0.3, 1.7, 8.2, 16.5, 17.5, 40.0}) {
        double w = bessel(BesselKind::J1, x) * bessel(BesselKind::Y0, x) -
                   bessel(BesselKind::J0, x) * bessel(BesselKind::Y1, x);
        EXPECT_NEAR(w * std::numbers::pi * x / 2, 1.0, 1e-12) << x;
    }
}

TEST(Bessel, rejects_nonpositive_arguments) {
    EXPECT_THROW(bessel_j1(0.0), InvalidArgument);
    EXPECT_THROW(bessel_k1(-1.0), InvalidArgument);
    EXPECT_THROW(parse_bessel_kind("H1"), InvalidArgument);
}
