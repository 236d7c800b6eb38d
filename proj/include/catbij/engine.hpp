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

#include <atomic>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "catbij/archive.hpp"
#include "catbij/config.hpp"
#include "catbij/executor.hpp"
#include "catbij/llm.hpp"
#include "catbij/scoring.hpp"

namespace catbij {

/// Raised when a seed program fails to parse in the executor.
class SeedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unrecoverable run-directory I/O (log or snapshot unwritable, state unreadable).
class RunIOError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kRunLogSchema = 1;

struct VerifiedProgram {
    CandidateProgram program;
    std::vector<SizeReport> reports;
};

struct RunResult {
    std::vector<std::optional<Elite>> best_per_island;
    std::optional<VerifiedProgram> verified;
    int iterations_done = 0;
    std::size_t chat_calls = 0;
    bool interrupted = false;
    std::filesystem::path run_dir;
    std::filesystem::path log_path;
};

/// Files inside a run directory.
struct RunPaths {
    std::filesystem::path dir;
    std::filesystem::path log() const { return dir / "run.jsonl"; }
    std::filesystem::path timing() const { return dir / "timing.jsonl"; }
    std::filesystem::path state() const { return dir / "state.json"; }
    std::filesystem::path config() const { return dir / "config.json"; }
    std::filesystem::path archive(int island) const { return dir / ("archive-" + std::to_string(island) + ".json"); }
};

/// Default run directory: <out_dir>/<UTC timestamp>-s<seed>.
std::filesystem::path default_run_dir(const RunConfig& config);

/// Evaluates every seed and inserts it into its island's archive. Throws
/// SeedError on a seed the executor cannot parse.
std::vector<Archive> seed_population(const RunConfig& config, CandidateExecutor& executor);

/// Fresh run into run_dir (created; must not already hold a run). Iterations
/// are scheduled round-robin over islands and run one at a time. A set
/// `stop` flag ends the run after the current iteration with a snapshot.
RunResult run(const RunConfig& config, ChatClient& client, CandidateExecutor& executor,
              const std::filesystem::path& run_dir, const std::atomic<bool>* stop = nullptr);

/// Continues a run for extra_iterations from its last snapshot; the log is
/// truncated to that snapshot and appended. A verified run is left as is.
/// Throws ConfigError when the config names a different problem or island
/// count than the run.
RunResult resume(const RunConfig& config, ChatClient& client, CandidateExecutor& executor,
                 const std::filesystem::path& run_dir, int extra_iterations, const std::atomic<bool>* stop = nullptr);

}  // namespace catbij
