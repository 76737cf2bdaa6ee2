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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fieldport/conventions.hpp"
#include "fieldport/grid.hpp"
#include "fieldport/states.hpp"

namespace fieldport::cli {

struct Diagnostic {
    std::string pointer;  // JSON pointer of the offending value ("" for the root)
    int line = 0;         // 1-based line in the config text, 0 when unknown
    std::string message;
};

/// Raised for any config that does not parse, does not match the schema or
/// is inconsistent across blocks. Carries every diagnostic found.
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string source, std::vector<Diagnostic> diagnostics);
    std::string source;
    std::vector<Diagnostic> diagnostics;
};

/// Validates `doc` against the subset of JSON Schema used by the shipped
/// schema: type, properties, required, additionalProperties (boolean),
/// items, enum, minimum, maximum, exclusiveMinimum, minItems, maxItems.
std::vector<Diagnostic> validate_schema(const nlohmann::json &doc, const nlohmann::json &schema);

/// The shipped scenario schema, embedded at build time.
const nlohmann::json &scenario_schema();

struct Times {
    double t_pair = 0.0;
    double t_packet = 0.2;
    double t_meas = 1.0;
    double t_out = 1.5;
};

struct ScenarioConfig {
    std::string source = "<defaults>";
    nlohmann::json document = nlohmann::json::object();
    std::string hash;  // FNV-1a of the canonical document

    Conventions conv;
    GaussianPacket packet;
    double epr_sigma = 0.125;
    std::vector<double> epr_q;
    Times times;
    MomentumGrid grid;

    std::vector<double> lattice_X{-1.0, 0.0, 1.0};
    std::vector<double> lattice_P{-0.25, 0.0, 0.25};
    std::vector<double> lattice_x{-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0};

    std::vector<double> scan_t{-2.0, 0.0, 1.0, 2.5};
    std::vector<double> scan_r{0.5, 1.5, 3.0, 5.0};
    int micro_points = 60;
    double micro_max_time = 3.0;
    std::vector<double> decay_masses{1.0, 2.0};
    int decay_samples = 9;

    std::uint64_t seed = 7;
    std::string output_dir = ".";
    std::vector<std::string> formats{"csv", "json", "svg"};

    bool wants(const std::string &format) const;
};

/// Parses, validates and fills defaults. Throws ConfigError.
ScenarioConfig parse_config(const std::string &text, const std::string &source);
/// Reads the file and calls parse_config. Throws ConfigError.
ScenarioConfig load_config(const std::string &path);
/// The defaults, as used when no config is given.
ScenarioConfig default_config();

/// Line of the value at `pointer` in `text`, found by walking the keys in
/// order. Returns the deepest line located.
int locate_line(const std::string &text, const std::string &pointer);

}  // namespace fieldport::cli
