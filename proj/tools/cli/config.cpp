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

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "output.hpp"
#include "schema_embed.hpp"

namespace fieldport::cli {

using nlohmann::json;

namespace {

std::string summarize(const std::string &source, const std::vector<Diagnostic> &d) {
    std::ostringstream s;
    s << source << ": invalid config";
    if (!d.empty()) {
        s << " (" << d.front().message << ")";
    }
    return s.str();
}

std::string type_name(const json &v) {
    if (v.is_number_integer()) {
        return "integer";
    }
    if (v.is_number()) {
        return "number";
    }
    return v.type_name();
}

bool has_type(const json &v, const std::string &t) {
    if (t == "object") {
        return v.is_object();
    }
    if (t == "array") {
        return v.is_array();
    }
    if (t == "string") {
        return v.is_string();
    }
    if (t == "boolean") {
        return v.is_boolean();
    }
    if (t == "number") {
        return v.is_number();
    }
    if (t == "integer") {
        if (v.is_number_integer()) {
            return true;
        }
        return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
    }
    if (t == "null") {
        return v.is_null();
    }
    return false;
}

std::string escape_token(const std::string &key) {
    std::string o;
    for (char c : key) {
        if (c == '~') {
            o += "~0";
        } else if (c == '/') {
            o += "~1";
        } else {
            o += c;
        }
    }
    return o;
}

void check(const json &v, const json &schema, const std::string &ptr, std::vector<Diagnostic> &out) {
    auto fail = [&](std::string msg) { out.push_back({ptr, 0, std::move(msg)}); };
    if (auto t = schema.find("type"); t != schema.end()) {
        if (!has_type(v, t->get<std::string>())) {
            fail("expected " + t->get<std::string>() + ", found " + type_name(v));
            return;
        }
    }
    if (auto e = schema.find("enum"); e != schema.end()) {
        if (std::find(e->begin(), e->end(), v) == e->end()) {
            fail("value " + v.dump() + " is not one of " + e->dump());
        }
    }
    if (v.is_number()) {
        double x = v.get<double>();
        if (auto m = schema.find("minimum"); m != schema.end() && x < m->get<double>()) {
            fail("must be >= " + m->dump());
        }
        if (auto m = schema.find("maximum"); m != schema.end() && x > m->get<double>()) {
            fail("must be <= " + m->dump());
        }
        if (auto m = schema.find("exclusiveMinimum"); m != schema.end() && !(x > m->get<double>())) {
            fail("must be > " + m->dump());
        }
    }
    if (v.is_array()) {
        if (auto m = schema.find("minItems"); m != schema.end() && v.size() < m->get<size_t>()) {
            fail("needs at least " + m->dump() + " items");
        }
        if (auto m = schema.find("maxItems"); m != schema.end() && v.size() > m->get<size_t>()) {
            fail("allows at most " + m->dump() + " items");
        }
        if (auto items = schema.find("items"); items != schema.end()) {
            for (size_t i = 0; i < v.size(); ++i) {
                check(v[i], *items, ptr + "/" + std::to_string(i), out);
            }
        }
    }
    if (v.is_object()) {
        const json empty = json::object();
        auto props_it = schema.find("properties");
        const json &props = props_it != schema.end() ? *props_it : empty;
        if (auto r = schema.find("required"); r != schema.end()) {
            for (const auto &key : *r) {
                if (!v.contains(key.get<std::string>())) {
                    fail("missing required key \"" + key.get<std::string>() + "\"");
                }
            }
        }
        bool closed = schema.value("additionalProperties", true) == false;
        for (auto it = v.begin(); it != v.end(); ++it) {
            std::string child = ptr + "/" + escape_token(it.key());
            if (auto p = props.find(it.key()); p != props.end()) {
                check(it.value(), *p, child, out);
            } else if (closed) {
                out.push_back({child, 0, "unknown key \"" + it.key() + "\""});
            }
        }
    }
}

std::vector<double> numbers(const json &v) {
    return v.get<std::vector<double>>();
}

}  // namespace

ConfigError::ConfigError(std::string source_, std::vector<Diagnostic> diagnostics_)
    : std::runtime_error(summarize(source_, diagnostics_)),
      source(std::move(source_)),
      diagnostics(std::move(diagnostics_)) {
}

std::vector<Diagnostic> validate_schema(const json &doc, const json &schema) {
    std::vector<Diagnostic> out;
    check(doc, schema, "", out);
    return out;
}

const json &scenario_schema() {
    static const json schema = json::parse(kScenarioSchemaText);
    return schema;
}

bool ScenarioConfig::wants(const std::string &format) const {
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

int locate_line(const std::string &text, const std::string &pointer) {
    size_t pos = 0;
    size_t found = std::string::npos;
    size_t start = 1;
    while (start <= pointer.size() && !pointer.empty()) {
        size_t end = pointer.find('/', start);
        std::string token = pointer.substr(start, end == std::string::npos ? std::string::npos : end - start);
        start = end == std::string::npos ? pointer.size() + 1 : end + 1;
        if (!token.empty() && std::all_of(token.begin(), token.end(), ::isdigit)) {
            break;  // array elements are not located individually
        }
        std::string needle = "\"" + token + "\"";
        size_t p = text.find(needle, pos);
        while (p != std::string::npos) {
            size_t q = text.find_first_not_of(" \t\r\n", p + needle.size());
            if (q != std::string::npos && text[q] == ':') {
                break;
            }
            p = text.find(needle, p + 1);
        }
        if (p == std::string::npos) {
            break;
        }
        found = pos = p;
    }
    if (found == std::string::npos) {
        return pointer.empty() ? 1 : 0;
    }
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
}

ScenarioConfig default_config() {
    return parse_config("{}", "<defaults>");
}

ScenarioConfig parse_config(const std::string &text, const std::string &source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        size_t byte = std::min<size_t>(e.byte, text.size());
        int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte > 0 ? byte - 1 : 0), '\n'));
        std::string msg = e.what();
        throw ConfigError(source, {{"", line, "JSON syntax error: " + msg}});
    }
    auto diags = validate_schema(doc, scenario_schema());
    if (!diags.empty()) {
        for (auto &d : diags) {
            d.line = locate_line(text, d.pointer);
        }
        throw ConfigError(source, diags);
    }

    ScenarioConfig c;
    c.source = source;
    c.document = doc;
    c.hash = fnv1a_hex(doc.dump());
    std::vector<Diagnostic> bad;
    auto reject = [&](const std::string &ptr, std::string msg) {
        bad.push_back({ptr, locate_line(text, ptr), std::move(msg)});
    };

    const json empty = json::object();
    auto block = [&](const char *key) -> const json & {
        auto it = doc.find(key);
        return it != doc.end() ? *it : empty;
    };

    const json &conv = block("conventions");
    c.conv = default_conventions(conv.value("spatial_dims", 3), conv.value("mass", 1.0));
    const int dims = c.conv.spatial_dims;
    auto sized = [&](const json &b, const char *key, const std::string &ptr) {
        if (!b.contains(key)) {
            return std::vector<double>(dims, 0.0);
        }
        auto v = numbers(b[key]);
        if (static_cast<int>(v.size()) != dims) {
            reject(ptr, "has " + std::to_string(v.size()) + " components, spatial_dims is " + std::to_string(dims));
        }
        return v;
    };

    const json &times = block("times");
    c.times.t_pair = times.value("t_pair", c.times.t_pair);
    c.times.t_packet = times.value("t_packet", c.times.t_packet);
    c.times.t_meas = times.value("t_meas", c.times.t_meas);
    c.times.t_out = times.value("t_out", c.times.t_out);

    const json &packet = block("packet");
    c.packet.k_center = sized(packet, "k_center", "/packet/k_center");
    c.packet.x_center = sized(packet, "x_center", "/packet/x_center");
    c.packet.sigma_k = packet.value("sigma_k", 0.5);
    c.packet.t0 = c.times.t_packet;
    if (packet.contains("t0")) {
        double t0 = packet["t0"].get<double>();
        if (times.contains("t_packet") && t0 != c.times.t_packet) {
            reject("/packet/t0", "disagrees with times.t_packet");
        }
        c.packet.t0 = c.times.t_packet = t0;
    }

    const json &epr = block("epr");
    c.epr_sigma = epr.value("sigma", c.epr_sigma);
    c.epr_q = sized(epr, "q_total", "/epr/q_total");
    if (epr.contains("pair_time")) {
        double tp = epr["pair_time"].get<double>();
        if (times.contains("t_pair") && tp != c.times.t_pair) {
            reject("/epr/pair_time", "disagrees with times.t_pair");
        }
        c.times.t_pair = tp;
    }

    const json &grid = block("grid");
    c.grid.dims = dims;
    c.grid.n_points = grid.value("n_points", dims == 1 ? 17 : 3);
    c.grid.spacing = grid.value("spacing", 0.4);
    if (c.grid.n_points % 2 == 0) {
        reject("/grid/n_points", "must be odd");
    }

    const json &lattice = block("lattice");
    if (lattice.contains("X")) {
        c.lattice_X = numbers(lattice["X"]);
    }
    if (lattice.contains("P")) {
        c.lattice_P = numbers(lattice["P"]);
    }
    if (lattice.contains("x")) {
        c.lattice_x = numbers(lattice["x"]);
    }

    const json &prop = block("propagator");
    if (prop.contains("t")) {
        c.scan_t = numbers(prop["t"]);
    }
    if (prop.contains("r")) {
        c.scan_r = numbers(prop["r"]);
    }
    const json &micro = block("microcausality");
    c.micro_points = micro.value("points", c.micro_points);
    c.micro_max_time = micro.value("max_time", c.micro_max_time);
    const json &decay = block("decay");
    if (decay.contains("masses")) {
        c.decay_masses = numbers(decay["masses"]);
    }
    c.decay_samples = decay.value("samples", c.decay_samples);

    c.seed = doc.value("seed", std::uint64_t{7});
    const json &output = block("output");
    c.output_dir = output.value("dir", c.output_dir);
    if (output.contains("formats")) {
        c.formats = output["formats"].get<std::vector<std::string>>();
    }

    if (!bad.empty()) {
        throw ConfigError(source, bad);
    }
    return c;
}

ScenarioConfig load_config(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError(path, {{"", 0, "cannot open file"}});
    }
    std::ostringstream s;
    s << f.rdbuf();
    return parse_config(s.str(), path);
}

}  // namespace fieldport::cli
