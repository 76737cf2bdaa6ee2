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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cli/cli.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"

using namespace fieldport::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string &name) {
    fs::path p = fs::temp_directory_path() / ("fieldport_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int run_quiet(const std::vector<std::string> &args, std::string *out = nullptr, std::string *err = nullptr) {
    std::ostringstream o, e;
    int rc = run(args, o, e);
    if (out) {
        *out = o.str();
    }
    if (err) {
        *err = e.str();
    }
    return rc;
}

}  // namespace

TEST(CliOutput, NumbersRoundTrip) {
    for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308, 1.0}) {
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(CliOutput, HashMatchesReferenceVectors) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(CliOutput, CsvQuotingAndLineEnds) {
    CsvTable t({"a", "b"});
    t.add_row({"1", "x,y"});
    t.add_row({"say \"hi\"", ""});
    EXPECT_EQ(t.str(), "a,b\r\n1,\"x,y\"\r\n\"say \"\"hi\"\"\",\r\n");
    EXPECT_THROW(t.add_row({"only one"}), std::logic_error);
}

TEST(CliOutput, AtomicWriteLeavesNoTemporaries) {
    auto dir = scratch_dir("atomic");
    write_atomic(dir / "sub" / "f.txt", "first");
    write_atomic(dir / "sub" / "f.txt", "second");
    EXPECT_EQ(slurp(dir / "sub" / "f.txt"), "second");
    size_t entries = 0;
    for ([[maybe_unused]] const auto &e : fs::directory_iterator(dir / "sub")) {
        ++entries;
    }
    EXPECT_EQ(entries, 1u);
}

TEST(CliOutput, ParallelForIsIndexStable) {
    std::vector<double> a(1000), b(1000);
    parallel_for(a.size(), 1, [&](size_t i) { a[i] = std::sqrt(static_cast<double>(i)); });
    parallel_for(b.size(), 7, [&](size_t i) { b[i] = std::sqrt(static_cast<double>(i)); });
    EXPECT_EQ(a, b);
    try {
        parallel_for(100, 4, [](size_t i) {
            if (i == 17 || i == 60) {
                throw std::runtime_error(std::to_string(i));
            }
        });
        FAIL();
    } catch (const std::runtime_error &e) {
        EXPECT_STREQ(e.what(), "17");
    }
}

TEST(CliOutput, SvgIsStaticSvg11) {
    auto line = svg_line_plot("t", "x", "y", {{"s", {0.0, 1.0, 2.0}, {1.0, 0.5, 0.25}}});
    auto heat = svg_heatmap("h", "x", "y", {0.0, 1.0}, {0.0, 1.0, 2.0}, {{0, 1}, {2, 3}, {4, 5}});
    for (const auto &svg : {line, heat}) {
        EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
        EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
        EXPECT_EQ(svg.find("date"), std::string::npos);
        EXPECT_NE(svg.find("</svg>"), std::string::npos);
    }
    EXPECT_NE(heat.find("#440154"), std::string::npos);  // map minimum
    EXPECT_NE(heat.find("#fde725"), std::string::npos);  // map maximum
}

TEST(CliConfig, DefaultsAndShippedConfigsValidate) {
    auto d = default_config();
    EXPECT_EQ(d.conv.spatial_dims, 3);
    EXPECT_EQ(d.packet.k_center.size(), 3u);
    EXPECT_EQ(d.hash, fnv1a_hex("{}"));
    for (const char *name : {"scenario_1d.json", "scenario_3d.json"}) {
        auto c = load_config(std::string(FIELDPORT_CONFIG_DIR) + "/" + name);
        EXPECT_EQ(c.packet.t0, c.times.t_packet);
        EXPECT_EQ(c.grid.dims, c.conv.spatial_dims);
    }
}

TEST(CliConfig, HashIgnoresFormatting) {
    auto a = parse_config("{\"seed\": 3, \"grid\": {\"spacing\": 0.5}}", "a");
    auto b = parse_config("{\n  \"grid\": {\"spacing\": 0.5},\n  \"seed\": 3\n}\n", "b");
    auto c = parse_config("{\"seed\": 4, \"grid\": {\"spacing\": 0.5}}", "c");
    EXPECT_EQ(a.hash, b.hash);
    EXPECT_NE(a.hash, c.hash);
}

TEST(CliConfig, SchemaDiagnosticsCarryLines) {
    std::string text =
        "{\n"
        "  \"conventions\": {\"mass\": 1},\n"
        "  \"packet\": {\n"
        "    \"k_center\": [0, 0, 0],\n"
        "    \"sigma_k\": 0,\n"
        "    \"x_center\": [0, 0, 0]\n"
        "  },\n"
        "  \"grid\": {\"n_points\": 2.5}\n"
        "}\n";
    try {
        parse_config(text, "c.json");
        FAIL();
    } catch (const ConfigError &e) {
        ASSERT_EQ(e.diagnostics.size(), 2u);
        EXPECT_EQ(e.diagnostics[0].pointer, "/grid/n_points");
        EXPECT_EQ(e.diagnostics[0].line, 8);
        EXPECT_EQ(e.diagnostics[1].pointer, "/packet/sigma_k");
        EXPECT_EQ(e.diagnostics[1].line, 5);
    }
}

TEST(CliConfig, RejectsCrossBlockConflicts) {
    EXPECT_THROW(parse_config("{\"packet\": {\"k_center\": [0,0,0], \"sigma_k\": 1, \"x_center\": [0,0,0], "
                              "\"t0\": 1}, \"times\": {\"t_packet\": 2}}",
                              "c"),
                 ConfigError);
    EXPECT_THROW(parse_config("{\"grid\": {\"n_points\": 4}}", "c"), ConfigError);
    EXPECT_THROW(parse_config("{\"epr\": {\"sigma\": 0.1, \"q_total\": [0]}}", "c"), ConfigError);
    EXPECT_THROW(parse_config("{\"output\": {\"formats\": [\"png\"]}}", "c"), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]", "c"), ConfigError);
    auto ok = parse_config("{\"packet\": {\"k_center\": [0,0,0], \"sigma_k\": 1, \"x_center\": [0,0,0], \"t0\": 0.7}}",
                           "c");
    EXPECT_EQ(ok.times.t_packet, 0.7);
}

TEST(CliConfig, ValidatorSubset) {
    auto schema = nlohmann::json::parse(R"({"type": "object", "required": ["a"],
        "properties": {"a": {"type": "array", "minItems": 2, "items": {"type": "integer", "maximum": 3}}}})");
    EXPECT_TRUE(validate_schema(nlohmann::json::parse(R"({"a": [1, 2.0]})"), schema).empty());
    auto d = validate_schema(nlohmann::json::parse(R"({"a": [4]})"), schema);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].pointer, "/a");
    EXPECT_EQ(d[1].pointer, "/a/0");
    EXPECT_EQ(validate_schema(nlohmann::json::parse("{}"), schema).size(), 1u);
}

TEST(CliRun, ExitCodes) {
    auto dir = scratch_dir("exit");
    std::string out, err;
    EXPECT_EQ(run_quiet({"--help"}, &out), kOk);
    EXPECT_NE(out.find("teleport-qudit"), std::string::npos);
    EXPECT_EQ(run_quiet({}), kInvalidConfig);
    EXPECT_EQ(run_quiet({"no-such-command"}), kInvalidConfig);
    EXPECT_EQ(run_quiet({"teleport-qudit", "--dim", "1"}), kInvalidConfig);
    EXPECT_EQ(run_quiet({"povm-check", "--config", (dir / "missing.json").string()}), kInvalidConfig);
    std::ofstream(dir / "bad.json") << "{\n  \"seed\": -1\n}\n";
    EXPECT_EQ(run_quiet({"povm-check", "--config", (dir / "bad.json").string()}, nullptr, &err), kInvalidConfig);
    EXPECT_NE(err.find("bad.json:2: /seed"), std::string::npos);
    // Valid config, but too few points for the point-count check.
    std::ofstream(dir / "few.json") << R"({"microcausality": {"points": 10},
        "output": {"dir": ")" + (dir / "few").string() + R"("}})";
    EXPECT_EQ(run_quiet({"microcausality", "--config", (dir / "few.json").string()}, &out, &err), kChecksFailed);
    EXPECT_NE(err.find("spacelike_point_count"), std::string::npos);
    auto summary = nlohmann::json::parse(out);
    EXPECT_FALSE(summary["pass"].get<bool>());
    EXPECT_TRUE(fs::exists(dir / "few" / "microcausality.csv"));
}

TEST(CliRun, TeleportQuditSummary) {
    auto dir = scratch_dir("teleport");
    std::string out;
    ASSERT_EQ(run_quiet({"teleport-qudit", "--dim", "2", "--trials", "100", "--seed", "7", "--out", dir.string()}, &out),
              kOk);
    auto j = nlohmann::json::parse(out);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["results"]["per_outcome_probability"].size(), 4u);
    for (const auto &p : j["results"]["per_outcome_probability"]) {
        EXPECT_NEAR(p.get<double>(), 0.25, 1e-12);
    }
    EXPECT_GE(j["results"]["min_fidelity"].get<double>(), 1.0 - 1e-12);
    EXPECT_TRUE(j.contains("config_hash"));
    EXPECT_EQ(j["conventions"]["metric"], "+---");
    EXPECT_EQ(slurp(dir / "teleport-qudit.json"), out);
}

TEST(CliRun, OutputsIndependentOfThreads) {
    auto base = scratch_dir("threads");
    std::ofstream(base / "c.json") << R"({
      "conventions": {"spatial_dims": 1},
      "lattice": {"X": [-1, 0.5], "P": [0, 0.25], "x": [-1, 0, 1]},
      "output": {"formats": ["csv", "json", "svg"]}
    })";
    std::string one, four;
    ASSERT_EQ(run_quiet({"amplitude-scan", "--config", (base / "c.json").string(), "--threads", "1", "--out",
                         (base / "t1").string()},
                        &one),
              kOk);
    setenv("FIELDPORT_THREADS", "4", 1);
    ASSERT_EQ(run_quiet({"amplitude-scan", "--config", (base / "c.json").string(), "--out", (base / "t4").string()},
                        &four),
              kOk);
    unsetenv("FIELDPORT_THREADS");
    EXPECT_EQ(one, four);
    for (const char *f : {"amplitude-scan.csv", "amplitude-scan.json", "amplitude-scan.svg"}) {
        EXPECT_EQ(slurp(base / "t1" / f), slurp(base / "t4" / f)) << f;
    }
    auto csv = slurp(base / "t1" / "amplitude-scan.csv");
    EXPECT_EQ(csv.rfind("X,P,x,re_total,im_total,re_t1,im_t1,re_t2,im_t2,re_par,im_par,est_error\r\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
}

TEST(CliRun, FormatsSelectArtifacts) {
    auto base = scratch_dir("formats");
    std::ofstream(base / "c.json") << R"({"conventions": {"spatial_dims": 1}, "output": {"formats": ["csv"]}})";
    ASSERT_EQ(run_quiet({"nr-limit", "--config", (base / "c.json").string(), "--out", (base / "o").string()}), kOk);
    EXPECT_TRUE(fs::exists(base / "o" / "nr-limit.csv"));
    EXPECT_FALSE(fs::exists(base / "o" / "nr-limit.json"));
    EXPECT_FALSE(fs::exists(base / "o" / "nr-limit.svg"));
}
