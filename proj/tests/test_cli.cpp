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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "catbij/cli.hpp"
#include "catbij/config.hpp"

using namespace catbij;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args, const std::atomic<bool>* stop = nullptr) {
    args.insert(args.begin(), "catbij");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err, stop);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::string kPrograms = CATBIJ_PROGRAMS_DIR;
const std::string kConfigs = CATBIJ_CONFIGS_DIR;

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "catbij_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_json(const fs::path& path, const json& doc) {
    std::ofstream(path) << doc.dump(2);
    return path;
}

json mock_config() {
    return {{"problem", "oda_to_dyck"},
            {"iterations", 6},
            {"seeds", {kPrograms + "/identity.py"}},
            {"models", {{{"name", "mock"}, {"endpoint", "mock"}}}},
            {"rng_seed", 3},
            {"mock_script", kConfigs + "/mock_oda_to_dyck.script.json"}};
}

}  // namespace

TEST_CASE("config parsing") {
    const auto base = scratch("config").string();
    SUBCASE("defaults and shared seeds") {
        auto doc = mock_config();
        doc["islands"] = 3;
        const auto c = parse_config(doc, base);
        CHECK(c.seeds.size() == 3);
        CHECK(c.seeds[2].front().source == slurp(kPrograms + "/identity.py"));
        CHECK(c.judge_weight == Rational(3, 10));
        CHECK_FALSE(c.judge_enabled());
        CHECK(c.all_mock());
        CHECK_NOTHROW(c.validate());
    }
    SUBCASE("missing problem") {
        auto doc = mock_config();
        doc.erase("problem");
        CHECK_THROWS_WITH_AS(parse_config(doc, base), doctest::Contains("problem"), ConfigError);
    }
    SUBCASE("unknown keys and inline secrets are rejected") {
        auto doc = mock_config();
        doc["iteratoins"] = 3;
        CHECK_THROWS_WITH_AS(parse_config(doc, base), doctest::Contains("iteratoins"), ConfigError);
        doc = mock_config();
        doc["models"][0]["api_key"] = "sk-secret";
        CHECK_THROWS_WITH_AS(parse_config(doc, base), doctest::Contains("environment"), ConfigError);
    }
    SUBCASE("environment interpolation") {
        ::setenv("CATBIJ_TEST_ENDPOINT", "https://llm.example.test/v1", 1);
        auto doc = mock_config();
        doc["models"] = {{{"name", "m"}, {"endpoint", "${CATBIJ_TEST_ENDPOINT}"}, {"api_key_env", "CATBIJ_TEST_KEY"}}};
        doc.erase("mock_script");
        const auto c = parse_config(doc, base);
        CHECK(c.ensemble[0].endpoint == "https://llm.example.test/v1");
        CHECK_FALSE(c.all_mock());
        ::unsetenv("CATBIJ_TEST_ENDPOINT");
        CHECK_THROWS_WITH_AS(parse_config(doc, base), doctest::Contains("CATBIJ_TEST_ENDPOINT"), ConfigError);
    }
    SUBCASE("mixed mock and real models") {
        auto doc = mock_config();
        doc["judge"] = {{"model", {{"name", "j"}, {"endpoint", "https://llm.example.test/v1"}}}};
        CHECK_THROWS_AS(parse_config(doc, base).validate(), ConfigError);
    }
    SUBCASE("echo round trip") {
        auto doc = mock_config();
        doc["judge"] = {{"model", {{"name", "j"}}}, {"weight", "1/4"}};
        const auto c = parse_config(doc, base);
        auto echo = config_to_json(c);
        echo["mock_script"] = c.mock_script;
        const auto again = parse_config(echo, base);
        CHECK(config_to_json(again) == config_to_json(c));
        CHECK(again.judge_weight == Rational(1, 4));
    }
}

TEST_CASE("cli run") {
    const auto dir = scratch("run");
    const auto config = write_json(dir / "config.json", mock_config());

    const auto r = cli({"run", config.string(), "--run-dir", (dir / "a").string()});
    INFO(r.err);
    REQUIRE(r.code == kExitOk);
    CHECK(fs::exists(dir / "a" / "run.jsonl"));
    CHECK(r.out.find("verified: c") != std::string::npos);

    // Same seed and script: same log bytes.
    REQUIRE(cli({"run", config.string(), "--run-dir", (dir / "b").string()}).code == kExitOk);
    CHECK(slurp(dir / "a" / "run.jsonl") == slurp(dir / "b" / "run.jsonl"));

    SUBCASE("iteration override") {
        const auto one = cli({"run", config.string(), "--iterations", "1", "--run-dir", (dir / "c").string()});
        REQUIRE(one.code == kExitOk);
        CHECK(one.out.find("iterations: 1 ") != std::string::npos);
        CHECK(one.out.find("not verified") != std::string::npos);
    }
    SUBCASE("default run directory under --out-dir") {
        const auto res = cli({"run", config.string(), "--out-dir", (dir / "runs").string(), "--seed", "9"});
        REQUIRE(res.code == kExitOk);
        std::vector<fs::path> made(fs::directory_iterator(dir / "runs"), fs::directory_iterator());
        REQUIRE(made.size() == 1);
        CHECK(made[0].filename().string().ends_with("-s9"));
    }
    SUBCASE("config errors exit 2") {
        auto doc = mock_config();
        doc.erase("problem");
        const auto bad = cli({"run", write_json(dir / "bad.json", doc).string(), "--run-dir", (dir / "d").string()});
        CHECK(bad.code == kExitUsage);
        CHECK(bad.err.find("problem") != std::string::npos);
        CHECK_FALSE(fs::exists(dir / "d"));
        CHECK(cli({"run", (dir / "missing.json").string()}).code == kExitUsage);
        CHECK(cli({"run", config.string(), "--judge-weight", "2"}).code == kExitUsage);
    }
    SUBCASE("runtime errors exit 3") {
        // The run directory already holds a run.
        CHECK(cli({"run", config.string(), "--run-dir", (dir / "a").string()}).code == kExitRuntime);
    }
    SUBCASE("offline replaces real endpoints") {
        auto doc = mock_config();
        doc["models"] = {{{"name", "m"}, {"endpoint", "http://127.0.0.1:9/v1"}}};
        const auto path = write_json(dir / "real.json", doc);
        const auto res = cli({"run", path.string(), "--offline", "--run-dir", (dir / "e").string()});
        CHECK(res.code == kExitOk);
        CHECK(slurp(dir / "e" / "run.jsonl").find("127.0.0.1") == std::string::npos);
    }
}

TEST_CASE("cli interrupt and resume") {
    const auto dir = scratch("resume");
    const auto config = write_json(dir / "config.json", mock_config());
    std::atomic<bool> stop{true};
    const auto r = cli({"run", config.string(), "--run-dir", (dir / "run").string()}, &stop);
    CHECK(r.code == kExitInterrupted);
    CHECK(r.err.find("catbij resume") != std::string::npos);
    CHECK(r.out.find("iterations: 0 ") != std::string::npos);  // the flag is checked before each iteration
    const auto more = cli({"resume", (dir / "run").string(), "--iterations", "6"});
    INFO(more.err);
    CHECK(more.code == kExitOk);
    CHECK(more.out.find("verified: c") != std::string::npos);
    CHECK(cli({"resume", (dir / "nothing").string(), "--iterations", "1"}).code == kExitUsage);
}

TEST_CASE("cli verify") {
    const auto ok = cli({"verify", kPrograms + "/bjs.py", "--problem", "dyck_to_av321", "--sizes", "1-6"});
    CHECK(ok.code == kExitOk);
    CHECK(line_count(ok.out) == 7);

    const auto constant = cli({"verify", kPrograms + "/constant.py", "--problem", "dyck_to_av321", "--sizes", "1,2,3"});
    CHECK(constant.code == kExitNotBijection);
    CHECK(constant.out.find("1/5") != std::string::npos);

    CHECK(cli({"verify", kPrograms + "/bjs.py", "--problem", "dyck_to_av321", "--sizes", "40"}).code == kExitUsage);
    CHECK(cli({"verify", kPrograms + "/bjs.py", "--problem", "nope"}).code == kExitUsage);
    CHECK(cli({"verify", kPrograms + "/missing.py", "--problem", "dyck_to_av321"}).code == kExitUsage);
    CHECK(cli({"verify", kPrograms + "/oda_to_dyck.py", "--problem", "oda_to_dyck"}).code == kExitOk);
}

TEST_CASE("cli enumerate") {
    CHECK(cli({"enumerate", "dyck", "2"}).out == "1010\n1100\n");
    CHECK(line_count(cli({"enumerate", "oda", "1"}).out) == 2);
    CHECK(line_count(cli({"enumerate", "av321", "4"}).out) == 14);
    CHECK(cli({"enumerate", "dyck", "99"}).code == kExitUsage);
    CHECK(cli({"enumerate", "widgets", "2"}).code == kExitUsage);
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("cli report") {
    const auto dir = scratch("report");
    auto doc = mock_config();
    doc["iterations"] = 3;
    const auto config = write_json(dir / "config.json", doc);
    REQUIRE(cli({"run", config.string(), "--run-dir", (dir / "run").string()}).code == kExitOk);
    const auto log = json::parse(slurp(dir / "run" / "run.jsonl").substr(0, slurp(dir / "run" / "run.jsonl").find('\n')));
    CHECK(log["kind"] == "header");

    const auto prog = cli({"report", (dir / "run").string(), "--kind", "progression"});
    REQUIRE(prog.code == kExitOk);
    CHECK(line_count(slurp(dir / "run" / "progression.csv")) == 1 + 3);

    const auto groups = cli({"report", (dir / "run" / "run.jsonl").string(), "--kind", "groups", "--out",
                             (dir / "out").string()});
    REQUIRE(groups.code == kExitOk);
    const auto g = json::parse(slurp(dir / "out" / "groups.json"));
    CHECK(g["group_count"].get<std::size_t>() >= g["distinct_score_tuples"].get<std::size_t>());

    const auto no_net = cli({"report", (dir / "run").string(), "--kind", "embedding"});
    CHECK(no_net.code == kExitUsage);
    CHECK(no_net.err.find("--fallback-embeddings") != std::string::npos);

    const auto emb = cli({"report", (dir / "run").string(), "--kind", "embedding", "--fallback-embeddings"});
    REQUIRE(emb.code == kExitOk);
    const auto csv = slurp(dir / "run" / "embedding.csv");
    CHECK(csv.starts_with("id,kind,island,iteration,surjectivity,final,pc1,pc2\n"));

    const auto down = cli({"report", (dir / "run").string(), "--kind", "embedding", "--embed-endpoint",
                           "http://127.0.0.1:9/v1"});
    CHECK(down.code == kExitRuntime);
    CHECK(down.err.find("c00000") != std::string::npos);

    CHECK(cli({"report", (dir / "nowhere").string(), "--kind", "groups"}).code == kExitUsage);
    CHECK(cli({"report", (dir / "run").string(), "--kind", "pictures"}).code == kExitUsage);
}
