// Copyright 2026 The catbij Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "catbij/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "catbij/problem.hpp"
#include "catbij/serialize.hpp"

namespace catbij {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (key == "api_key" || key == "key" || key == "token")
            throw ConfigError(where + "." + key + ": secrets belong in environment variables (use api_key_env)");
        if (!allowed.count(key)) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
    }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(fmt::format("{}.{}: missing or wrong type", where, key));
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    return obj.contains(key) ? get<T>(obj, key, where) : fallback;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    const fs::path p(path);
    return p.is_absolute() ? p.string() : (fs::path(base_dir) / p).lexically_normal().string();
}

std::string read_file(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read {} '{}'", what, path));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelSpec parse_model(const json& m, const std::string& where) {
    require_keys(m, {"name", "endpoint", "weight", "temperature", "max_tokens", "api_key_env"}, where);
    ModelSpec spec;
    spec.name = get<std::string>(m, "name", where);
    spec.endpoint = get_or<std::string>(m, "endpoint", "mock", where);
    spec.sampling_weight = get_or<double>(m, "weight", 1.0, where);
    spec.temperature = get_or<double>(m, "temperature", 0.7, where);
    spec.max_tokens = get_or<int>(m, "max_tokens", 4096, where);
    spec.api_key_env = get_or<std::string>(m, "api_key_env", "", where);
    return spec;
}

json model_to_json(const ModelSpec& m) {
    return {{"name", m.name},       {"endpoint", m.endpoint},     {"weight", m.sampling_weight},
            {"temperature", m.temperature}, {"max_tokens", m.max_tokens}, {"api_key_env", m.api_key_env}};
}

std::vector<SeedProgram> parse_seed_list(const json& list, const std::string& base_dir, const std::string& where) {
    if (!list.is_array()) throw ConfigError(where + " must be an array");
    std::vector<SeedProgram> seeds;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& s = list[i];
        const auto at = fmt::format("{}[{}]", where, i);
        if (s.is_string()) {
            const auto path = resolve(s.get<std::string>(), base_dir);
            seeds.push_back({path, read_file(path, "seed program")});
        } else if (s.is_object()) {
            require_keys(s, {"source"}, at);
            seeds.push_back({"inline", get<std::string>(s, "source", at)});
        } else {
            throw ConfigError(at + ": expected a file path or {\"source\": ...}");
        }
    }
    return seeds;
}

}  // namespace

bool RunConfig::all_mock() const {
    for (const auto& m : ensemble)
        if (!m.is_mock()) return false;
    return !judge || judge->is_mock();
}

void RunConfig::validate() const {
    try {
        find_problem(problem);
    } catch (const std::invalid_argument&) {
        throw ConfigError(fmt::format("problem: unknown problem '{}'", problem));
    }
    if (iterations <= 0) throw ConfigError("iterations must be positive");
    if (islands < 1) throw ConfigError("islands must be at least 1");
    if (static_cast<int>(seeds.size()) != islands)
        throw ConfigError(fmt::format("expected seeds for {} islands, got {}", islands, seeds.size()));
    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (seeds[i].empty()) throw ConfigError(fmt::format("island {} has no seed programs", i));
    if (ensemble.empty()) throw ConfigError("models: at least one model is required");
    for (const auto& m : ensemble)
        if (!(m.sampling_weight > 0)) throw ConfigError("models: weight must be positive for " + m.name);
    if (judge_weight < Rational(0) || judge_weight > Rational(1)) throw ConfigError("judge weight must lie in [0, 1]");
    if (judge_samples < 1) throw ConfigError("judge samples must be at least 1");
    if (inspiration_k < 0) throw ConfigError("inspiration_k must be nonnegative");
    if (snapshot_every < 1) throw ConfigError("snapshot_every must be positive");
    if (limits.per_input_timeout_ms <= 0 || limits.total_timeout_ms <= 0 || limits.memory_limit_mb <= 0)
        throw ConfigError("limits must be positive");
    try {
        descriptor.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("descriptor: ") + e.what());
    }
    bool any_mock = false, any_real = false;
    for (const auto& m : ensemble) (m.is_mock() ? any_mock : any_real) = true;
    if (judge) (judge->is_mock() ? any_mock : any_real) = true;
    if (any_mock && any_real) throw ConfigError("mixing mock and real model endpoints in one run is not supported");
    if (any_mock && mock_script.empty()) throw ConfigError("mock models need a mock_script");
    if (executor.kind != "native" && executor.kind != "subprocess")
        throw ConfigError("executor.kind must be native or subprocess");
    if (executor.kind == "subprocess" && executor.argv.empty()) throw ConfigError("executor.argv is required for subprocess");
    const auto& spec = find_problem(problem);
    const int nt = n_train.value_or(spec.n_train);
    if (nt < 1) throw ConfigError("n_train must be positive");
    try {
        spec.check_size(nt);
        for (int n : n_verify.value_or(spec.n_verify)) {
            if (n < 1) throw ConfigError("n_verify sizes must be positive");
            spec.check_size(n);
        }
    } catch (const ResourceLimit& e) {
        throw ConfigError(std::string("size out of bounds: ") + e.what());
    }
}

json interpolate_env(const json& doc) {
    static const std::regex var(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)\})");
    if (doc.is_string()) {
        const auto s = doc.get<std::string>();
        std::string out;
        auto begin = s.cbegin();
        for (std::sregex_iterator it(s.begin(), s.end(), var), end; it != end; ++it) {
            const auto name = (*it)[1].str();
            const char* value = std::getenv(name.c_str());
            if (!value) throw ConfigError("environment variable " + name + " is not set");
            out.append(begin, (*it)[0].first);
            out += value;
            begin = (*it)[0].second;
        }
        out.append(begin, s.cend());
        return out;
    }
    if (doc.is_array() || doc.is_object()) {
        json copy = doc;
        for (auto& v : copy) v = interpolate_env(v);
        return copy;
    }
    return doc;
}

RunConfig parse_config(const json& raw, const std::string& base_dir) {
    const std::string top = "config";
    require_keys(raw, {"problem", "iterations", "islands", "seeds", "seeds_per_island", "models", "judge",
                       "descriptor", "rng_seed", "limits", "inspiration_k", "snapshot_every", "n_train", "n_verify",
                       "mock_script", "executor", "out_dir"},
                 top);
    const json doc = interpolate_env(raw);
    RunConfig c;
    if (!doc.contains("problem")) throw ConfigError("config.problem: required (one of oda_to_dyck, dyck_to_av321, area_bounce)");
    c.problem = get<std::string>(doc, "problem", top);
    c.iterations = get_or<int>(doc, "iterations", c.iterations, top);
    c.islands = get_or<int>(doc, "islands", c.islands, top);
    c.rng_seed = get_or<std::uint64_t>(doc, "rng_seed", 0, top);
    c.inspiration_k = get_or<int>(doc, "inspiration_k", c.inspiration_k, top);
    c.snapshot_every = get_or<int>(doc, "snapshot_every", c.snapshot_every, top);
    if (doc.contains("n_train")) c.n_train = get<int>(doc, "n_train", top);
    if (doc.contains("n_verify")) c.n_verify = get<std::vector<int>>(doc, "n_verify", top);
    if (doc.contains("mock_script")) c.mock_script = resolve(get<std::string>(doc, "mock_script", top), base_dir);
    if (doc.contains("out_dir")) c.out_dir = resolve(get<std::string>(doc, "out_dir", top), base_dir);

    if (doc.contains("seeds_per_island")) {
        const auto& per = doc["seeds_per_island"];
        if (!per.is_array()) throw ConfigError("config.seeds_per_island must be an array of arrays");
        for (std::size_t i = 0; i < per.size(); ++i)
            c.seeds.push_back(parse_seed_list(per[i], base_dir, fmt::format("config.seeds_per_island[{}]", i)));
        if (!doc.contains("islands")) c.islands = static_cast<int>(c.seeds.size());
    } else if (doc.contains("seeds")) {
        const auto shared = parse_seed_list(doc["seeds"], base_dir, "config.seeds");
        c.seeds.assign(static_cast<std::size_t>(std::max(c.islands, 0)), shared);
    } else {
        throw ConfigError("config.seeds: required");
    }

    if (!doc.contains("models")) throw ConfigError("config.models: required");
    const auto& models = doc["models"];
    if (!models.is_array()) throw ConfigError("config.models must be an array");
    for (std::size_t i = 0; i < models.size(); ++i)
        c.ensemble.push_back(parse_model(models[i], fmt::format("config.models[{}]", i)));

    if (doc.contains("judge") && !doc["judge"].is_null()) {
        const auto& j = doc["judge"];
        require_keys(j, {"model", "weight", "samples"}, "config.judge");
        c.judge = parse_model(j.contains("model") ? j["model"] : json::object(), "config.judge.model");
        if (j.contains("weight")) {
            try {
                c.judge_weight = j["weight"].get<Rational>();
            } catch (const std::exception&) {
                throw ConfigError("config.judge.weight: expected a number or \"n/d\"");
            }
        }
        c.judge_samples = get_or<int>(j, "samples", 1, "config.judge");
    }

    if (doc.contains("descriptor")) {
        try {
            c.descriptor = descriptor_from_json(doc["descriptor"]);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config.descriptor: ") + e.what());
        }
    }
    if (doc.contains("limits")) {
        require_keys(doc["limits"], {"per_input_timeout_ms", "total_timeout_ms", "memory_limit_mb"}, "config.limits");
        try {
            c.limits = doc["limits"].get<ExecutionLimits>();
        } catch (const json::exception&) {
            throw ConfigError("config.limits: values must be integers");
        }
    }
    if (doc.contains("executor")) {
        const auto& e = doc["executor"];
        require_keys(e, {"kind", "argv", "grace_ms"}, "config.executor");
        c.executor.kind = get_or<std::string>(e, "kind", "native", "config.executor");
        c.executor.argv = get_or<std::vector<std::string>>(e, "argv", {}, "config.executor");
        c.executor.grace_ms = get_or<int>(e, "grace_ms", 2000, "config.executor");
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
    return parse_config(doc, fs::absolute(path).parent_path().string());
}

json config_to_json(const RunConfig& c) {
    json seeds = json::array();
    for (const auto& island : c.seeds) {
        json list = json::array();
        for (const auto& s : island) list.push_back({{"source", s.source}});
        seeds.push_back(list);
    }
    json models = json::array();
    for (const auto& m : c.ensemble) models.push_back(model_to_json(m));
    json j = {{"problem", c.problem},
              {"iterations", c.iterations},
              {"islands", c.islands},
              {"seeds_per_island", seeds},
              {"models", models},
              {"descriptor", descriptor_to_json(c.descriptor)},
              {"rng_seed", c.rng_seed},
              {"limits", c.limits},
              {"inspiration_k", c.inspiration_k},
              {"snapshot_every", c.snapshot_every},
              {"executor", {{"kind", c.executor.kind}, {"argv", c.executor.argv}, {"grace_ms", c.executor.grace_ms}}}};
    j["judge"] = c.judge ? json{{"model", model_to_json(*c.judge)}, {"weight", c.judge_weight}, {"samples", c.judge_samples}}
                         : json(nullptr);
    if (c.n_train) j["n_train"] = *c.n_train;
    if (c.n_verify) j["n_verify"] = *c.n_verify;
    return j;
}

}  // namespace catbij
