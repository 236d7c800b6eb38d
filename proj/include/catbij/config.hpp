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

#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catbij/archive.hpp"
#include "catbij/executor.hpp"
#include "catbij/llm.hpp"
#include "catbij/rational.hpp"

namespace catbij {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SeedProgram {
    std::string label;  // file path or "inline"
    std::string source;
};

struct ExecutorConfig {
    std::string kind = "native";  // native | subprocess
    std::vector<std::string> argv;
    int grace_ms = 2000;
};

struct RunConfig {
    std::string problem;
    int iterations = 10;
    int islands = 1;
    std::vector<std::vector<SeedProgram>> seeds;  // one list per island
    std::vector<ModelSpec> ensemble;
    std::optional<ModelSpec> judge;  // absent: empirical-only run
    Rational judge_weight{3, 10};
    int judge_samples = 1;
    FeatureDescriptor descriptor = FeatureDescriptor::standard();
    std::uint64_t rng_seed = 0;
    ExecutionLimits limits;
    int inspiration_k = 4;
    int snapshot_every = 10;
    std::optional<int> n_train;        // defaults to the problem's
    std::optional<std::vector<int>> n_verify;
    std::string mock_script;           // used when every model is a mock
    ExecutorConfig executor;
    std::string out_dir = "runs";

    bool judge_enabled() const { return judge.has_value(); }
    bool all_mock() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Replaces ${NAME} in every string value with the environment variable.
/// Throws ConfigError when a variable is unset.
nlohmann::json interpolate_env(const nlohmann::json& doc);

/// Maps a config document onto RunConfig. Relative file paths (seeds, mock
/// script) resolve against base_dir. Unknown keys and inline secrets are
/// rejected. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir);
RunConfig load_config(const std::string& path);

/// Stable JSON echo of a config (seeds inline, no output directory).
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace catbij
