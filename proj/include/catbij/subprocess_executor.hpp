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

#include <chrono>
#include <string>
#include <vector>

#include "catbij/executor.hpp"

namespace catbij {

struct SubprocessOptions {
    /// Runner command line; argv[0] is looked up on PATH.
    std::vector<std::string> argv;
    /// Extra time past total_timeout before the runner's process group is killed.
    std::chrono::milliseconds grace{2000};
    /// Address-space cap is memory_limit_mb plus this headroom; 0 disables it.
    int memory_headroom_mb = 256;
};

/// Runs one runner process per request and speaks the wire protocol to it.
///
/// The runner is supervised with a hard deadline of total_timeout + grace;
/// past it the whole process group is killed and inputs without a record are
/// reported as timeouts. A runner that exits early without a complete reply,
/// or that breaks the protocol, raises ExecutorFailure.
class SubprocessExecutor : public CandidateExecutor {
public:
    explicit SubprocessExecutor(SubprocessOptions options);

    ExecutionReply execute(const ExecutionRequest& request) override;

    /// Last stderr bytes of the most recent runner, for diagnostics.
    const std::string& last_stderr() const { return last_stderr_; }

private:
    SubprocessOptions options_;
    std::string last_stderr_;
};

}  // namespace catbij
