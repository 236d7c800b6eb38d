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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "catbij/executor.hpp"

namespace catbij {

/// A compiled-in candidate: returns canonical output text, std::nullopt to
/// abstain, or throws to signal an error.
using Kernel = std::function<std::optional<std::string>(std::string_view input, const std::string& arg)>;

/// Name of the kernel a source binds through a `kernel: <name> [arg]`
/// comment line, if any.
struct KernelBinding {
    std::string name;
    std::string arg;
};
std::optional<KernelBinding> find_kernel_binding(std::string_view source);

/// In-process executor. Candidate sources are bound to registered native
/// kernels through their `kernel:` line, so reference programs and mock runs
/// need no external runner. Inputs are evaluated in parallel with OpenMP;
/// execute_serial is the reference path kept for tests and benchmarks.
class NativeExecutor : public CandidateExecutor {
public:
    /// Registers the built-in kernels.
    explicit NativeExecutor(bool parallel = true);

    void register_kernel(const std::string& name, Kernel kernel);
    bool has_kernel(const std::string& name) const { return kernels_.contains(name); }

    ExecutionReply execute(const ExecutionRequest& request) override;
    ExecutionReply execute_serial(const ExecutionRequest& request) const;
    ExecutionReply execute_parallel(const ExecutionRequest& request) const;

    static constexpr std::string_view kVersion = "native-1";

private:
    struct Bound {
        const Kernel* kernel = nullptr;
        std::string arg;
        std::string error;
    };
    Bound bind(const std::string& source) const;

    bool parallel_;
    std::map<std::string, Kernel, std::less<>> kernels_;
};

}  // namespace catbij
