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
#include <iosfwd>

namespace catbij {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitNotBijection = 1,
    kExitUsage = 2,  // bad arguments, bad config, out-of-bound size
    kExitRuntime = 3,
    kExitInterrupted = 130,
};

/// Entry point of the catbij tool. `stop` is polled by long-running
/// commands; a set flag ends a run after its current iteration with a
/// snapshot.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
             const std::atomic<bool>* stop = nullptr);

}  // namespace catbij
