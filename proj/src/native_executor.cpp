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

#include "catbij/native_executor.hpp"

#include <chrono>
#include <regex>
#include <thread>

#include "catbij/combinatorics.hpp"

namespace catbij {

namespace {

using Clock = std::chrono::steady_clock;

// Stack map from Dyck paths to permutations: push on up steps, pop on down
// steps, deferring smaller stack entries behind the last output value.
std::string stack_insertion(std::string_view input) {
    const auto path = DyckPath::parse(input);
    std::vector<int> perm;
    std::vector<int> stack;
    int next = 1;
    for (auto step : path.steps().steps()) {
        if (step == 1) {
            stack.push_back(next++);
            continue;
        }
        const int last = perm.empty() ? -1 : perm.back();
        std::vector<int> to_move;
        while (!stack.empty() && stack.back() < last) {
            to_move.push_back(stack.back());
            stack.pop_back();
        }
        if (!stack.empty()) {
            perm.push_back(stack.back());
            stack.pop_back();
        }
        perm.insert(perm.end(), to_move.rbegin(), to_move.rend());
    }
    while (!stack.empty()) {
        perm.push_back(stack.back());
        stack.pop_back();
    }
    return Permutation(std::move(perm)).text();
}

OutputRecord run_one(const Kernel& kernel, const std::string& arg, const std::string& input, int index,
                     int per_input_timeout_ms) {
    const auto start = Clock::now();
    OutputRecord record;
    try {
        auto out = kernel(input, arg);
        record = out ? OutputRecord::ok(index, std::move(*out)) : OutputRecord::abstain(index);
    } catch (const std::exception& e) {
        record = OutputRecord::error(index, e.what());
    }
    // Native kernels cannot be preempted; overruns are reported after the fact.
    if (Clock::now() - start > std::chrono::milliseconds(per_input_timeout_ms)) record = OutputRecord::timeout(index);
    return record;
}

}  // namespace

std::optional<KernelBinding> find_kernel_binding(std::string_view source) {
    static const std::regex line(R"((?:#|//)\s*kernel:\s*([A-Za-z0-9_]+)(?:[ \t]+([^\s]+))?)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(source.begin(), source.end(), m, line)) return std::nullopt;
    return KernelBinding{m[1].str(), m[2].matched ? m[2].str() : std::string{}};
}

NativeExecutor::NativeExecutor(bool parallel) : parallel_(parallel) {
    register_kernel("identity", [](std::string_view in, const std::string&) { return std::string(in); });
    register_kernel("constant", [](std::string_view, const std::string& arg) { return arg; });
    register_kernel("abstain", [](std::string_view, const std::string&) { return std::optional<std::string>{}; });
    register_kernel("raise", [](std::string_view, const std::string&) -> std::optional<std::string> {
        throw std::runtime_error("candidate raised");
    });
    register_kernel("sleep", [](std::string_view in, const std::string& arg) {
        std::this_thread::sleep_for(std::chrono::milliseconds(arg.empty() ? 10 : std::stoi(arg)));
        return std::string(in);
    });
    register_kernel("oda_to_dyck", [](std::string_view in, const std::string&) {
        return oda_to_dyck_steps(StepSequence::parse(in)).text();
    });
    register_kernel("bjs", [](std::string_view in, const std::string&) {
        return bjs_bijection(DyckPath::parse(in)).text();
    });
    register_kernel("zeta", [](std::string_view in, const std::string&) { return zeta(DyckPath::parse(in)).text(); });
    register_kernel("stack_insertion", [](std::string_view in, const std::string&) { return stack_insertion(in); });
    register_kernel("area_bounce_fixed_points", [](std::string_view in, const std::string&) -> std::optional<std::string> {
        const auto d = DyckPath::parse(in);
        if (area(d) != bounce(d)) return std::nullopt;
        return d.text();
    });
}

void NativeExecutor::register_kernel(const std::string& name, Kernel kernel) {
    kernels_[name] = std::move(kernel);
}

NativeExecutor::Bound NativeExecutor::bind(const std::string& source) const {
    Bound b;
    if (source.find_first_not_of(" \t\r\n") == std::string::npos) {
        b.error = "empty source";
        return b;
    }
    const auto binding = find_kernel_binding(source);
    if (!binding) {
        b.error = "source binds no native kernel";
        return b;
    }
    const auto it = kernels_.find(binding->name);
    if (it == kernels_.end()) {
        b.error = "unknown native kernel: " + binding->name;
        return b;
    }
    b.kernel = &it->second;
    b.arg = binding->arg;
    return b;
}

ExecutionReply NativeExecutor::execute(const ExecutionRequest& request) {
    return parallel_ ? execute_parallel(request) : execute_serial(request);
}

ExecutionReply NativeExecutor::execute_serial(const ExecutionRequest& request) const {
    validate_request(request);
    ExecutionReply reply;
    reply.runner_version = std::string(kVersion);
    const auto bound = bind(request.source);
    if (!bound.kernel) {
        reply.message = bound.error;
        return reply;
    }
    reply.syntax_ok = true;
    const auto deadline = Clock::now() + std::chrono::milliseconds(request.limits.total_timeout_ms);
    reply.records.reserve(request.inputs.size());
    for (std::size_t i = 0; i < request.inputs.size(); ++i) {
        const int index = static_cast<int>(i);
        if (Clock::now() >= deadline) {
            reply.records.push_back(OutputRecord::timeout(index));
            continue;
        }
        reply.records.push_back(
            run_one(*bound.kernel, bound.arg, request.inputs[i], index, request.limits.per_input_timeout_ms));
    }
    return reply;
}

ExecutionReply NativeExecutor::execute_parallel(const ExecutionRequest& request) const {
    validate_request(request);
    ExecutionReply reply;
    reply.runner_version = std::string(kVersion);
    const auto bound = bind(request.source);
    if (!bound.kernel) {
        reply.message = bound.error;
        return reply;
    }
    reply.syntax_ok = true;
    const auto deadline = Clock::now() + std::chrono::milliseconds(request.limits.total_timeout_ms);
    const auto count = static_cast<std::ptrdiff_t>(request.inputs.size());
    reply.records.resize(request.inputs.size());

#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const int index = static_cast<int>(i);
        const auto u = static_cast<std::size_t>(i);
        if (Clock::now() >= deadline) {
            reply.records[u] = OutputRecord::timeout(index);
        } else {
            reply.records[u] =
                run_one(*bound.kernel, bound.arg, request.inputs[u], index, request.limits.per_input_timeout_ms);
        }
    }
    return reply;
}

}  // namespace catbij
