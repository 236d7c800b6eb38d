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

// Test runner that speaks the wire protocol and misbehaves on request.
// A `fake: <mode>` line in the source picks the behaviour; without one it
// serves the request with the native kernels.
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <regex>
#include <string>
#include <thread>

#include "catbij/native_executor.hpp"
#include "catbij/wire.hpp"

using namespace catbij;

namespace {

[[noreturn]] void hang() {
    while (true) std::this_thread::sleep_for(std::chrono::hours(1));
}

}  // namespace

int main() {
    std::string line;
    if (!std::getline(std::cin, line)) return 3;
    const auto request = wire::decode_request(line);
    std::smatch m;
    const std::regex pragma(R"(fake:\s*(\w+))");
    const std::string mode = std::regex_search(request.source, m, pragma) ? m[1].str() : "";

    NativeExecutor native(false);
    auto reply = native.execute(request);
    auto& out = std::cout;
    const wire::ReplyHeader header{true, "fake-1", ""};

    if (mode == "hang") hang();
    if (mode == "garbage") {
        out << "this is not json\n" << std::flush;
        return 0;
    }
    if (mode == "crash") {
        out << wire::encode_header(header) << wire::encode_record(reply.records.at(0)) << std::flush;
        std::abort();
    }
    if (mode == "partial_hang") {
        out << wire::encode_header(header) << wire::encode_record(reply.records.at(0)) << std::flush;
        hang();
    }
    if (mode == "short_exit") {
        out << wire::encode_header(header) << std::flush;
        return 0;
    }
    if (mode == "out_of_order") {
        out << wire::encode_header(header) << wire::encode_record(reply.records.back()) << std::flush;
        return 0;
    }
    if (mode == "syntax") {
        out << wire::encode_header({false, "fake-1", "SyntaxError: invalid syntax (line 1)"}) << std::flush;
        return 0;
    }
    if (mode == "chatty") {
        // Extra fields everywhere; a conforming reader ignores them.
        out << R"({"syntax_ok": true, "runner_version": "fake-1", "pid": 42, "extra": {"a": [1]}})" << "\n";
        for (const auto& r : reply.records) {
            auto rec = wire::encode_record(r);
            rec.insert(1, R"("elapsed_ms": 0.5, )");
            out << rec;
        }
        out << std::flush;
        return 0;
    }
    if (mode == "linger") {
        // Complete reply, then keep stdout open from a child process.
        out << wire::encode_header(header);
        for (const auto& r : reply.records) out << wire::encode_record(r);
        out << std::flush;
        if (::fork() == 0) hang();
        return 0;
    }
    if (mode == "memory") {
        // Touch far more than the address-space cap; must not succeed.
        std::string big;
        try {
            big.assign(std::size_t{4} << 30, 'x');
        } catch (const std::bad_alloc&) {
            return 4;
        }
        out << big.size();
        return 0;
    }
    out << wire::encode_header({reply.syntax_ok, "fake-1", reply.message});
    if (reply.syntax_ok)
        for (const auto& r : reply.records) out << wire::encode_record(r);
    out << std::flush;
    return 0;
}
