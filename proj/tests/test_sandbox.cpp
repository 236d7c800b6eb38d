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

#include <doctest.h>

#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

#include "catbij/combinatorics.hpp"
#include "catbij/native_executor.hpp"
#include "catbij/subprocess_executor.hpp"
#include "catbij/wire.hpp"

using namespace catbij;
using Clock = std::chrono::steady_clock;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SubprocessExecutor fake(std::chrono::milliseconds grace = std::chrono::milliseconds(200)) {
    return SubprocessExecutor({.argv = {CATBIJ_FAKE_RUNNER}, .grace = grace});
}

ExecutionRequest request(const std::string& source, std::vector<std::string> inputs, int total_ms = 5000) {
    return {source, std::move(inputs), {.per_input_timeout_ms = 100, .total_timeout_ms = total_ms, .memory_limit_mb = 256}};
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

}  // namespace

TEST_CASE("wire messages round trip") {
    const ExecutionRequest req{"# kernel: identity\ndef bijection(p):\n    \"\"\"Id.\"\"\"\n    return p\n",
                               {"10", "1100", "caf\xc3\xa9"},
                               {.per_input_timeout_ms = 7, .total_timeout_ms = 70, .memory_limit_mb = 700}};
    const auto line = wire::encode_request(req);
    CHECK(line.back() == '\n');
    CHECK(std::count(line.begin(), line.end(), '\n') == 1);
    const auto back = wire::decode_request(line);
    CHECK(back.source == req.source);
    CHECK(back.inputs == req.inputs);
    CHECK(back.limits.per_input_timeout_ms == 7);
    CHECK(back.limits.total_timeout_ms == 70);
    CHECK(back.limits.memory_limit_mb == 700);

    const auto h = wire::decode_header(wire::encode_header({false, "v9", "bad\nline"}));
    CHECK_FALSE(h.syntax_ok);
    CHECK(h.runner_version == "v9");
    CHECK(h.message == "bad\nline");

    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> status(0, 3), ch(1, 127), len(0, 40);
    for (int i = 0; i < 500; ++i) {
        std::string text;
        for (int k = len(rng); k > 0; --k) text += static_cast<char>(ch(rng));
        OutputRecord r;
        switch (status(rng)) {
            case 0: r = OutputRecord::ok(i, text); break;
            case 1: r = OutputRecord::abstain(i); break;
            case 2: r = OutputRecord::error(i, text); break;
            default: r = OutputRecord::timeout(i); break;
        }
        const auto line = wire::encode_record(r);
        CHECK(std::count(line.begin(), line.end(), '\n') == 1);
        CHECK(wire::decode_record(line) == r);
    }
}

TEST_CASE("wire decoding is strict about shape and lax about extras") {
    const auto r = wire::decode_record(R"({"index": 3, "status": "ok", "output": "10", "cpu_ms": 4, "note": null})");
    CHECK(r == OutputRecord::ok(3, "10"));
    CHECK(wire::decode_header(R"({"syntax_ok": true, "runner_version": "x", "future": [1, 2]})").syntax_ok);

    CHECK_THROWS_AS(wire::decode_record(R"({"index": 0, "status": "ok"})"), wire::WireError);
    CHECK_THROWS_AS(wire::decode_record(R"({"index": 0, "status": "abstain", "output": "1"})"), wire::WireError);
    CHECK_THROWS_AS(wire::decode_record(R"({"index": 0, "status": "exploded"})"), wire::WireError);
    CHECK_THROWS_AS(wire::decode_record("[1, 2]"), wire::WireError);
    CHECK_THROWS_AS(wire::decode_header("{"), wire::WireError);
    CHECK_THROWS_AS(wire::decode_request(R"({"source": "x"})"), wire::WireError);

    const std::string huge(wire::kMaxMessageBytes, '1');
    CHECK_THROWS_AS(wire::encode_request({huge, {"1"}, {}}), wire::WireError);
    const auto rec = wire::decode_record(wire::encode_record(OutputRecord::ok(5, huge)));
    CHECK(rec.status == RecordStatus::error);
    CHECK(rec.input_index == 5);
}

TEST_CASE("serve answers one request") {
    NativeExecutor native(false);
    std::istringstream in(wire::encode_request(request("# kernel: identity", {"10", "1100"})));
    std::ostringstream out;
    CHECK(wire::serve(in, out, native) == 0);
    std::istringstream reply(out.str());
    std::string line;
    std::getline(reply, line);
    CHECK(wire::decode_header(line).syntax_ok);
    std::getline(reply, line);
    CHECK(wire::decode_record(line) == OutputRecord::ok(0, "10"));
    std::getline(reply, line);
    CHECK(wire::decode_record(line) == OutputRecord::ok(1, "1100"));
    CHECK_FALSE(std::getline(reply, line));

    std::istringstream bad("{\"source\": 1}\n");
    std::ostringstream out2;
    CHECK(wire::serve(bad, out2, native) != 0);
    CHECK_FALSE(wire::decode_header(out2.str()).syntax_ok);
}

TEST_CASE("subprocess executor over the native runner") {
    SubprocessExecutor exec({.argv = {CATBIJ_NATIVE_RUNNER}});
    const auto dyck2 = Family::parse("dyck").enumerate(2);
    const auto id = exec.execute(request(slurp(std::string(CATBIJ_PROGRAMS_DIR) + "/identity.py"), dyck2));
    CHECK(id.syntax_ok);
    CHECK(id.runner_version == NativeExecutor::kVersion);
    REQUIRE(id.records.size() == 2);
    CHECK(id.records[0] == OutputRecord::ok(0, dyck2[0]));
    CHECK(id.records[1] == OutputRecord::ok(1, dyck2[1]));

    const auto raised = exec.execute(request("# kernel: raise", dyck2));
    REQUIRE(raised.records.size() == 2);
    for (const auto& r : raised.records) CHECK(r.status == RecordStatus::error);

    const auto syntax = exec.execute(request("", dyck2));
    CHECK_FALSE(syntax.syntax_ok);
    CHECK(syntax.records.empty());

    // Same answers as in-process execution, and repeatable.
    NativeExecutor native(false);
    const auto oda = Family::parse("oda").enumerate(2);
    const auto src = slurp(std::string(CATBIJ_PROGRAMS_DIR) + "/oda_to_dyck.py");
    const auto a = exec.execute(request(src, oda));
    const auto b = exec.execute(request(src, oda));
    CHECK(a.records == native.execute(request(src, oda)).records);
    CHECK(a.records == b.records);
}

TEST_CASE("total timeout bounds the runner") {
    SubprocessExecutor exec({.argv = {CATBIJ_NATIVE_RUNNER}, .grace = std::chrono::milliseconds(200)});
    const auto start = Clock::now();
    const auto reply = exec.execute(request("# kernel: sleep 5000", {"10", "1100", "1010"}, 300));
    const double wall = seconds_since(start);
    CHECK(reply.syntax_ok);
    REQUIRE(reply.records.size() == 3);
    for (const auto& r : reply.records) CHECK(r.status == RecordStatus::timeout);
    CHECK(wall < 2.0);  // 0.3 s budget + 0.2 s grace, generous margin for slow hosts
}

TEST_CASE("misbehaving runners") {
    const std::vector<std::string> inputs{"10", "1100", "1010"};
    auto exec = fake();

    SUBCASE("hang before replying") {
        const auto start = Clock::now();
        const auto r = exec.execute(request("# fake: hang", inputs, 300));
        CHECK(seconds_since(start) < 2.0);
        REQUIRE(r.records.size() == 3);
        for (const auto& rec : r.records) CHECK(rec.status == RecordStatus::timeout);
    }
    SUBCASE("hang after one record") {
        const auto r = exec.execute(request("# fake: partial_hang\n# kernel: identity", inputs, 300));
        REQUIRE(r.records.size() == 3);
        CHECK(r.records[0] == OutputRecord::ok(0, "10"));
        CHECK(r.records[1].status == RecordStatus::timeout);
        CHECK(r.records[2].status == RecordStatus::timeout);
    }
    SUBCASE("crash mid-reply") {
        CHECK_THROWS_AS(exec.execute(request("# fake: crash\n# kernel: identity", inputs)), ExecutorFailure);
    }
    SUBCASE("clean exit with missing records") {
        CHECK_THROWS_AS(exec.execute(request("# fake: short_exit\n# kernel: identity", inputs)), ExecutorFailure);
    }
    SUBCASE("garbage") {
        CHECK_THROWS_AS(exec.execute(request("# fake: garbage", inputs)), ExecutorFailure);
    }
    SUBCASE("records out of order") {
        CHECK_THROWS_AS(exec.execute(request("# fake: out_of_order\n# kernel: identity", inputs)), ExecutorFailure);
    }
    SUBCASE("syntax failure") {
        const auto r = exec.execute(request("# fake: syntax", inputs));
        CHECK_FALSE(r.syntax_ok);
        CHECK(r.records.empty());
        CHECK(r.message.find("SyntaxError") != std::string::npos);
    }
    SUBCASE("unknown fields are ignored") {
        const auto r = exec.execute(request("# fake: chatty\n# kernel: identity", inputs));
        REQUIRE(r.records.size() == 3);
        CHECK(r.records[2] == OutputRecord::ok(2, "1010"));
    }
    SUBCASE("a lingering child does not delay the reply") {
        const auto start = Clock::now();
        const auto r = exec.execute(request("# fake: linger\n# kernel: identity", inputs, 20000));
        CHECK(seconds_since(start) < 3.0);
        CHECK(r.records.size() == 3);
    }
    SUBCASE("memory cap") {
        CHECK_THROWS_AS(exec.execute(request("# fake: memory", inputs)), ExecutorFailure);
    }
}

TEST_CASE("missing runner binary") {
    SubprocessExecutor exec({.argv = {"/nonexistent/catbij-runner"}});
    CHECK_THROWS_AS(exec.execute(request("# kernel: identity", {"10"})), ExecutorFailure);
    CHECK_THROWS_AS(SubprocessExecutor({.argv = {}}), std::invalid_argument);
}
