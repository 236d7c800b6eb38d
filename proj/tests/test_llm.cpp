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

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "catbij/llm.hpp"
#include "catbij/parse.hpp"
#include "catbij/prompts.hpp"

using namespace catbij;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Compares against a frozen file; CATBIJ_UPDATE_GOLDEN=1 rewrites it.
void check_golden(const std::string& name, const std::string& actual) {
    const std::string path = std::string(CATBIJ_GOLDEN_DIR) + "/" + name;
    if (std::getenv("CATBIJ_UPDATE_GOLDEN")) {
        std::ofstream(path) << actual;
    }
    REQUIRE(std::filesystem::exists(path));
    CHECK(slurp(path) == actual);
}

CandidateProgram fixture_parent() {
    CandidateProgram p;
    p.id = "c0007";
    p.source = slurp(std::string(CATBIJ_PROGRAMS_DIR) + "/stack_insertion.py");
    p.docstring = "Read the path with a stack: up steps push the next label, down steps pop.";
    p.island = 1;
    p.iteration = 7;
    p.model_name = "mock";
    return p;
}

Evaluation fixture_eval(bool with_judge) {
    Evaluation e;
    e.empirical.surjectivity = Rational(13, 14);
    e.empirical.injectivity = Rational(13, 14);
    e.empirical.validity = Rational(1);
    e.empirical.combined = (Rational(13, 14) + Rational(13, 14) + Rational(1)) / Rational(3);
    e.empirical.defined_fraction = Rational(1);
    e.final_score = e.empirical.combined;
    e.n_eval = 4;
    if (with_judge) {
        e.judge = JudgeScores{Rational(1), Rational(4, 5), Rational(1, 2),
                              "The stack discipline matches the docstring.",
                              "The image misses 3142-containing permutations; revisit how deferred labels are placed."};
    }
    return e;
}

struct LocalServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    LocalServer() = default;
    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LocalServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

std::string chat_body(const std::string& content) {
    return R"({"choices":[{"message":{"role":"assistant","content":)" + nlohmann::json(content).dump() +
           R"(}}],"usage":{"prompt_tokens":11,"completion_tokens":5}})";
}

}  // namespace

TEST_CASE("sample_model") {
    std::mt19937_64 rng(42);
    SUBCASE("single model") {
        std::vector<ModelSpec> one{{.name = "only"}};
        for (int i = 0; i < 100; ++i) CHECK(sample_model(one, rng).name == "only");
    }
    SUBCASE("equal weights stay within three sigma") {
        std::vector<ModelSpec> two{{.name = "a", .sampling_weight = 1}, {.name = "b", .sampling_weight = 1}};
        int a = 0;
        for (int i = 0; i < 10000; ++i) a += sample_model(two, rng).name == "a";
        CHECK(std::abs(a - 5000) <= 150);  // sigma = 50
    }
    SUBCASE("3:1 weights") {
        std::vector<ModelSpec> two{{.name = "a", .sampling_weight = 3}, {.name = "b", .sampling_weight = 1}};
        int a = 0;
        for (int i = 0; i < 10000; ++i) a += sample_model(two, rng).name == "a";
        CHECK(std::abs(a - 7500) <= 130);  // sigma = sqrt(10000 * 3/16) ~ 43.3
    }
    SUBCASE("deterministic under a seed") {
        std::vector<ModelSpec> three{{.name = "a"}, {.name = "b", .sampling_weight = 2}, {.name = "c"}};
        std::mt19937_64 r1(9), r2(9);
        for (int i = 0; i < 200; ++i) CHECK(sample_model(three, r1).name == sample_model(three, r2).name);
    }
    std::vector<ModelSpec> none;
    CHECK_THROWS_AS(sample_model(none, rng), std::invalid_argument);
    std::vector<ModelSpec> bad{{.name = "z", .sampling_weight = 0}};
    CHECK_THROWS_AS(sample_model(bad, rng), std::invalid_argument);
}

TEST_CASE("scripted client replays its script") {
    ScriptedClient client({"first", "second"});
    const ModelSpec m{.name = "mock"};
    CHECK(client.complete({"s", "u"}, m).text == "first");
    CHECK(client.complete({"s", "u2"}, m).text == "second");
    CHECK(client.requests().size() == 2);
    CHECK(client.requests()[1].user == "u2");
    try {
        client.complete({"s", "u"}, m);
        FAIL("expected exhaustion");
    } catch (const ChatFailure& f) {
        CHECK(f.kind() == ChatFailureKind::script_exhausted);
    }

    const auto path = std::filesystem::temp_directory_path() / "catbij_script_test.json";
    std::ofstream(path) << R"({"responses": ["x", "y", "z"]})";
    auto from_file = ScriptedClient::from_file(path.string());
    CHECK(from_file.size() == 3);
    from_file.set_cursor(2);
    CHECK(from_file.complete({}, m).text == "z");
    std::ofstream(path) << "not json";
    CHECK_THROWS(ScriptedClient::from_file(path.string()));
}

TEST_CASE("http client retries with backoff and honours Retry-After") {
    LocalServer srv;
    std::atomic<int> calls{0};
    std::string seen_auth;
    srv.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        const int n = ++calls;
        seen_auth = req.get_header_value("Authorization");
        if (n == 1) {
            res.status = 429;
            res.set_header("Retry-After", "2");
            return;
        }
        if (n == 2) {
            res.status = 503;
            return;
        }
        const auto body = nlohmann::json::parse(req.body);
        res.set_content(chat_body("echo:" + body["messages"][1]["content"].get<std::string>()), "application/json");
    });
    srv.start();

    ::setenv("CATBIJ_TEST_KEY", "sekret", 1);
    RetryPolicy policy{.max_attempts = 4, .base_delay = std::chrono::milliseconds(100),
                       .max_delay = std::chrono::milliseconds(1000), .multiplier = 2.0};
    HttpChatClient client(policy, 2);
    std::vector<std::chrono::milliseconds> sleeps;
    client.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d); });

    const ModelSpec model{.name = "m", .endpoint = srv.url(), .api_key_env = "CATBIJ_TEST_KEY"};
    const auto r = client.complete({"sys", "hello"}, model);
    CHECK(r.text == "echo:hello");
    CHECK(r.usage.prompt_tokens == 11);
    CHECK(calls == 3);
    REQUIRE(sleeps.size() == 2);
    CHECK(sleeps[0] == std::chrono::milliseconds(2000));  // server-advised, above the 100 ms backoff
    CHECK(sleeps[1] == std::chrono::milliseconds(200));
    CHECK(seen_auth == "Bearer sekret");
}

TEST_CASE("http client gives up at the retry cap and does not retry client errors") {
    LocalServer srv;
    std::atomic<int> calls{0};
    srv.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 500;
    });
    srv.server.Post("/bad/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 400;
    });
    srv.start();

    HttpChatClient client(RetryPolicy{.max_attempts = 3, .base_delay = std::chrono::milliseconds(1)});
    client.set_sleeper([](std::chrono::milliseconds) {});
    try {
        client.complete({"s", "u"}, ModelSpec{.name = "m", .endpoint = srv.url()});
        FAIL("expected failure");
    } catch (const ChatFailure& f) {
        CHECK(f.kind() == ChatFailureKind::server);
    }
    CHECK(calls == 3);

    calls = 0;
    try {
        client.complete({"s", "u"}, ModelSpec{.name = "m", .endpoint = "http://127.0.0.1:" + std::to_string(srv.port) + "/bad"});
        FAIL("expected failure");
    } catch (const ChatFailure& f) {
        CHECK(f.kind() == ChatFailureKind::client);
    }
    CHECK(calls == 1);
}

TEST_CASE("http client reports network failures") {
    // Bind then release a port so nothing listens on it.
    int port = 0;
    {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
        socklen_t len = sizeof addr;
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
        port = ntohs(addr.sin_port);
        ::close(fd);
    }
    HttpChatClient client(RetryPolicy{.max_attempts = 2, .base_delay = std::chrono::milliseconds(1)}, 1,
                          std::chrono::seconds(5));
    int sleeps = 0;
    client.set_sleeper([&](std::chrono::milliseconds) { ++sleeps; });
    try {
        client.complete({"s", "u"}, ModelSpec{.name = "m", .endpoint = "http://127.0.0.1:" + std::to_string(port)});
        FAIL("expected failure");
    } catch (const ChatFailure& f) {
        CHECK(f.kind() == ChatFailureKind::network);
    }
    CHECK(sleeps == 1);
    CHECK(RetryPolicy{}.backoff(1) == std::chrono::milliseconds(500));
    CHECK(RetryPolicy{}.backoff(20) == std::chrono::milliseconds(30000));
}

TEST_CASE("evolution prompt") {
    const auto& problem = find_problem("dyck_to_av321");
    const auto parent = fixture_parent();
    const auto eval = fixture_eval(true);
    CandidateProgram other = parent;
    other.id = "c0003";
    other.source = slurp(std::string(CATBIJ_PROGRAMS_DIR) + "/identity.py");
    const std::vector<std::pair<CandidateProgram, Evaluation>> insp{{other, fixture_eval(false)}};

    const auto a = build_evolution_prompt(problem, parent, eval, insp);
    const auto b = build_evolution_prompt(problem, parent, eval, insp);
    CHECK(a.system == b.system);
    CHECK(a.user == b.user);

    CHECK(a.user.find("no indices i < j < k with p[i] > p[j] > p[k]") != std::string::npos);
    CHECK(a.user.find(parent.source) != std::string::npos);
    CHECK(a.user.find("revisit how deferred labels are placed") != std::string::npos);
    CHECK(a.user.find("Do not generate all objects") != std::string::npos);
    CHECK(a.user.find("## c0003") != std::string::npos);
    CHECK(a.user.find(problem.steering) != std::string::npos);

    const auto bare = build_evolution_prompt(problem, parent, fixture_eval(false), {});
    CHECK(bare.user.find("Other programs from the population") == std::string::npos);
    CHECK(bare.user.find("Reviewer feedback") == std::string::npos);

    check_golden("evolution_dyck_to_av321.txt", a.system + "\n----\n" + a.user);
}

TEST_CASE("judge prompt") {
    const auto& problem = find_problem("dyck_to_av321");
    const auto cand = fixture_parent();
    const auto flags = static_cheat_scan("perms = list(itertools.permutations(range(n)))\n");
    const auto a = build_judge_prompt(problem, cand, fixture_eval(false).empirical, flags);
    CHECK(a.user == build_judge_prompt(problem, cand, fixture_eval(false).empirical, flags).user);
    CHECK(a.user.find("1. Cheating") != std::string::npos);
    CHECK(a.user.find("2. Faithfulness") != std::string::npos);
    CHECK(a.user.find("3. Simplicity") != std::string::npos);
    CHECK(a.user.find(cand.docstring) != std::string::npos);
    CHECK(a.user.find("breadth-first search") != std::string::npos);
    CHECK(a.user.find("codomain_enumeration") != std::string::npos);
    CHECK(a.user.find("```json") != std::string::npos);
    CHECK(build_judge_prompt(problem, cand, fixture_eval(false).empirical).user.find("Automated scan") ==
          std::string::npos);
    check_golden("judge_dyck_to_av321.txt", a.system + "\n----\n" + a.user);
}

TEST_CASE("parse_program_response") {
    const std::string one = "Here you go:\n```python\ndef bijection(p):\n    \"\"\"Identity.\"\"\"\n    return p\n```\n";
    const auto p = parse_program_response(one);
    CHECK(p.source == "def bijection(p):\n    \"\"\"Identity.\"\"\"\n    return p");
    CHECK(p.docstring == "Identity.");

    const std::string two =
        "First attempt:\n```python\ndef f():\n    '''Old.'''\n```\nBetter:\n```python\n"
        "def bijection(p):\n    \"\"\"\n    New idea.\n      indented detail\n    \"\"\"\n    return p\n```";
    const auto q = parse_program_response(two);
    CHECK(q.source.find("New idea") != std::string::npos);
    CHECK(q.docstring == "New idea.\n  indented detail");

    try {
        parse_program_response("I could not do it.");
        FAIL("expected error");
    } catch (const ResponseParseError& e) {
        CHECK(e.kind() == ResponseError::no_code_block);
    }
    try {
        parse_program_response("```python\ndef bijection(p):\n    return p\n```");
        FAIL("expected error");
    } catch (const ResponseParseError& e) {
        CHECK(e.kind() == ResponseError::empty_docstring);
    }
    CHECK_THROWS_AS(parse_program_response("```python\n\"\"\"   \"\"\"\n```"), ResponseParseError);
}

TEST_CASE("rendering then parsing a program is the identity on source") {
    std::mt19937_64 rng(3);
    const std::vector<std::string> pieces{"def bijection(p):", "    ", "return p", "\n", "\"\"\"Doc.\"\"\"", "x = [1, 0]",
                                          "# comment", "\t", "``", "  ", "'''", "\n\n", "`x`", "if a:"};
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::uniform_int_distribution<int> len(0, 30);
    for (int trial = 0; trial < 500; ++trial) {
        std::string src = "\"\"\"Generated docstring.\"\"\"\n";
        const int k = len(rng);
        for (int i = 0; i < k; ++i) src += pieces[pick(rng)];
        // Lines starting with a fence would end the block early.
        if (src.find("\n```") != std::string::npos) continue;
        const auto parsed = parse_program_response("prose\n" + render_program_block(src) + "\ntrailing prose");
        CHECK(parsed.source == src);
    }
}

TEST_CASE("parse_judge_response") {
    const auto ok = parse_judge_response(
        "Looks fine.\n```json\n{\"cheating\": 1.0, \"faithfulness\": 0.7, \"simplicity\": 0.4, "
        "\"reasoning\": \"r\", \"suggestions\": \"s\"}\n```");
    CHECK(ok.scores.cheating == Rational(1));
    CHECK(ok.scores.faithfulness == Rational(7, 10));
    CHECK(ok.scores.simplicity == Rational(2, 5));
    CHECK(ok.scores.reasoning == "r");
    CHECK(ok.scores.suggestions == "s");
    CHECK(ok.warnings.empty());

    const auto clamped = parse_judge_response("```json\n{\"cheating\": 1.3, \"faithfulness\": -0.2, \"simplicity\": \"0.5\"}\n```");
    CHECK(clamped.scores.cheating == Rational(1));
    CHECK(clamped.scores.faithfulness == Rational(0));
    CHECK(clamped.scores.simplicity == Rational(1, 2));
    CHECK(clamped.warnings.size() == 2);

    const auto fallback = parse_judge_response("The code pairs by index.\n```json\n{\"cheating\": 0, \"faithfulness\": 1, \"simplicity\": 0}\n```");
    CHECK(fallback.scores.reasoning == "The code pairs by index.");

    try {
        parse_judge_response("cheating: 1.0, faithfulness: 0.5, simplicity: 0.5");
        FAIL("expected error");
    } catch (const ResponseParseError& e) {
        CHECK(e.kind() == ResponseError::no_score_block);
    }
    CHECK_THROWS_AS(parse_judge_response("```json\n{\"cheating\": 1, \"faithfulness\": \"high\", \"simplicity\": 1}\n```"),
                    ResponseParseError);
    CHECK_THROWS_AS(parse_judge_response("```json\n{\"cheating\": 1}\n```"), ResponseParseError);
}

TEST_CASE("median judge aggregation") {
    std::vector<JudgeScores> s{
        {Rational(1), Rational(1, 5), Rational(1), "a", ""},
        {Rational(0), Rational(4, 5), Rational(1, 2), "b", ""},
        {Rational(1), Rational(1, 2), Rational(0), "c", ""},
    };
    const auto m = median_judge(s);
    CHECK(m.cheating == Rational(1));
    CHECK(m.faithfulness == Rational(1, 2));
    CHECK(m.simplicity == Rational(1, 2));
    CHECK(m.reasoning == "a");
    CHECK(median_judge({s[1]}).cheating == Rational(0));
    CHECK_THROWS(median_judge({}));
}
