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

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "catbij/cheat_scan.hpp"
#include "catbij/native_executor.hpp"
#include "catbij/scoring.hpp"

using namespace catbij;

namespace {

std::string read_program(const std::string& name) {
    std::ifstream in(std::string(CATBIJ_PROGRAMS_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::vector<OutputRecord> map_records(const std::vector<std::string>& domain,
                                      const std::function<std::optional<std::string>(const std::string&)>& f) {
    std::vector<OutputRecord> out;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        auto v = f(domain[i]);
        out.push_back(v ? OutputRecord::ok(static_cast<int>(i), *v) : OutputRecord::abstain(static_cast<int>(i)));
    }
    return out;
}

// Oracle: a total map is a bijection iff its output list, sorted, equals the
// sorted codomain list.
bool brute_force_bijection(const std::vector<OutputRecord>& records, std::vector<std::string> codomain) {
    std::vector<std::string> outs;
    for (const auto& r : records) {
        if (r.status != RecordStatus::ok) return false;
        outs.push_back(*r.output);
    }
    std::sort(outs.begin(), outs.end());
    std::sort(codomain.begin(), codomain.end());
    return outs == codomain;
}

bool in_unit(const Rational& r) { return r >= Rational(0) && r <= Rational(1); }

}  // namespace

TEST_CASE("empirical scores on named maps") {
    const auto dyck3 = Family::parse("dyck").enumerate(3);
    const auto cod3 = as_set(dyck3);

    SUBCASE("identity") {
        const auto s = empirical_scores(map_records(dyck3, [](const std::string& x) { return x; }), cod3, dyck3.size());
        CHECK(s.surjectivity == Rational(1));
        CHECK(s.injectivity == Rational(1));
        CHECK(s.validity == Rational(1));
        CHECK(s.combined == Rational(1));
        CHECK(s.defined_fraction == Rational(1));
    }
    SUBCASE("constant") {
        const auto s = empirical_scores(map_records(dyck3, [](const std::string&) { return std::string("101010"); }),
                                        cod3, dyck3.size());
        CHECK(s.surjectivity == Rational(1, 5));
        CHECK(s.injectivity == Rational(1, 5));
        CHECK(s.validity == Rational(1));
        CHECK(s.combined == Rational(7, 15));
    }
    SUBCASE("partial seed-map profile: 8 distinct valid outputs, 6 abstains") {
        const auto dyck4 = Family::parse("dyck").enumerate(4);
        REQUIRE(dyck4.size() == 14);
        std::vector<OutputRecord> recs;
        for (std::size_t i = 0; i < dyck4.size(); ++i) {
            const int idx = static_cast<int>(i);
            recs.push_back(i < 8 ? OutputRecord::ok(idx, dyck4[13 - i]) : OutputRecord::abstain(idx));
        }
        const auto s = empirical_scores(recs, as_set(dyck4), dyck4.size());
        CHECK(s.surjectivity == Rational(8, 14));
        CHECK(s.injectivity == Rational(1));
        CHECK(s.validity == Rational(1));
        CHECK(s.defined_fraction == Rational(8, 14));
    }
    SUBCASE("nothing defined") {
        std::vector<OutputRecord> recs;
        for (std::size_t i = 0; i < dyck3.size(); ++i) recs.push_back(OutputRecord::abstain(static_cast<int>(i)));
        const auto s = empirical_scores(recs, cod3, dyck3.size());
        CHECK(s.surjectivity == Rational(0));
        CHECK(s.injectivity == Rational(1));
        CHECK(s.validity == Rational(1));
        CHECK(s.defined_fraction == Rational(0));
    }
    SUBCASE("invalid outputs do not count toward surjectivity") {
        auto recs = map_records(dyck3, [](const std::string& x) { return x + "10"; });
        const auto s = empirical_scores(recs, cod3, dyck3.size());
        CHECK(s.surjectivity == Rational(0));
        CHECK(s.validity == Rational(0));
        CHECK(s.injectivity == Rational(1));
    }
    SUBCASE("contract violations") {
        CHECK_THROWS_AS(empirical_scores({}, cod3, 5), std::invalid_argument);
        CHECK_THROWS_AS(empirical_scores({OutputRecord::abstain(0)}, {}, 1), std::invalid_argument);
    }
}

TEST_CASE("empirical score invariants on random partial maps") {
    std::mt19937_64 rng(7);
    const auto dyck4 = Family::parse("dyck").enumerate(4);
    const auto cod = as_set(dyck4);
    std::vector<std::string> pool = dyck4;
    pool.push_back("0101");
    pool.push_back("111000");
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<OutputRecord> recs;
        std::uniform_int_distribution<int> status(0, 5);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (std::size_t i = 0; i < dyck4.size(); ++i) {
            const int idx = static_cast<int>(i);
            switch (status(rng)) {
                case 0: recs.push_back(OutputRecord::abstain(idx)); break;
                case 1: recs.push_back(OutputRecord::error(idx, "boom")); break;
                case 2: recs.push_back(OutputRecord::timeout(idx)); break;
                default: recs.push_back(OutputRecord::ok(idx, pool[pick(rng)])); break;
            }
        }
        const auto s = empirical_scores(recs, cod, recs.size());
        CHECK(in_unit(s.surjectivity));
        CHECK(in_unit(s.injectivity));
        CHECK(in_unit(s.validity));
        CHECK(in_unit(s.defined_fraction));
        CHECK(s.combined * Rational(3) == s.surjectivity + s.injectivity + s.validity);

        auto shuffled = recs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(empirical_scores(shuffled, cod, recs.size()) == s);

        // Turning an abstain into a fresh, valid output never lowers surjectivity.
        std::set<std::string> used;
        for (const auto& r : recs) if (r.output) used.insert(*r.output);
        const auto fresh = std::find_if(dyck4.begin(), dyck4.end(), [&](const auto& d) { return !used.contains(d); });
        const auto slot = std::find_if(recs.begin(), recs.end(), [](const auto& r) { return r.status != RecordStatus::ok; });
        if (fresh != dyck4.end() && slot != recs.end()) {
            auto more = recs;
            more[static_cast<std::size_t>(slot - recs.begin())] = OutputRecord::ok(slot->input_index, *fresh);
            CHECK(empirical_scores(more, cod, more.size()).surjectivity > s.surjectivity);
        }
    }
}

TEST_CASE("bijection iff all scores are 1, cross-checked by brute force") {
    std::mt19937_64 rng(11);
    const auto dyck3 = Family::parse("dyck").enumerate(3);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::string> image = dyck3;
        std::shuffle(image.begin(), image.end(), rng);
        // Occasionally break the map.
        if (trial % 3 == 1) image[0] = image[1];
        if (trial % 5 == 2) image[2] = "1100";
        std::vector<OutputRecord> recs;
        for (std::size_t i = 0; i < image.size(); ++i) recs.push_back(OutputRecord::ok(static_cast<int>(i), image[i]));
        if (trial % 7 == 3) recs[4] = OutputRecord::abstain(4);
        const auto s = empirical_scores(recs, as_set(dyck3), recs.size());
        const bool all_one = s.surjectivity == Rational(1) && s.injectivity == Rational(1) &&
                             s.validity == Rational(1) && s.defined_fraction == Rational(1);
        CHECK(all_one == brute_force_bijection(recs, dyck3));
    }
}

TEST_CASE("final score") {
    EmpiricalScores e;
    e.combined = Rational(4, 5);
    CHECK(final_score(e, std::nullopt, Rational(1, 2)) == Rational(4, 5));

    e.combined = Rational(3, 5);
    JudgeScores j{Rational(1), Rational(1, 2), Rational(1, 2), "", ""};
    const auto f = final_score(e, j, Rational(1, 2));
    CHECK(f == Rational(1, 2) * Rational(2, 3) + Rational(1, 2) * Rational(3, 5));
    CHECK(f.to_double() == doctest::Approx(0.633333).epsilon(1e-5));

    e.combined = Rational(1);
    JudgeScores cheat{Rational(0), Rational(1), Rational(1), "", ""};
    CHECK(final_score(e, cheat, Rational(1, 2)) == Rational(0));
    CHECK(final_score(e, cheat, Rational(0)) == Rational(0));

    CHECK_THROWS_AS(final_score(e, j, Rational(3, 2)), std::invalid_argument);

    SUBCASE("monotone in each numeric input away from the cheating filter") {
        const std::vector<Rational> grid{Rational(1, 10), Rational(1, 3), Rational(1, 2), Rational(9, 10), Rational(1)};
        for (const auto& w : grid) {
            for (std::size_t a = 0; a + 1 < grid.size(); ++a) {
                EmpiricalScores lo, hi;
                lo.combined = grid[a];
                hi.combined = grid[a + 1];
                JudgeScores base{Rational(1, 2), Rational(1, 2), Rational(1, 2), "", ""};
                CHECK(final_score(lo, base, w) <= final_score(hi, base, w));
                JudgeScores up = base;
                up.cheating = grid[a + 1];
                JudgeScores down = base;
                down.cheating = grid[a];
                CHECK(final_score(lo, down, w) <= final_score(lo, up, w));
                up = base;
                up.simplicity = grid[a + 1];
                down = base;
                down.simplicity = grid[a];
                CHECK(final_score(lo, down, w) <= final_score(lo, up, w));
            }
        }
    }
}

TEST_CASE("verify_bijection with reference programs") {
    NativeExecutor exec;
    const auto& oda = find_problem("oda_to_dyck");
    for (const auto& r : verify_bijection(exec, read_program("oda_to_dyck.py"), oda, {1, 2, 3})) {
        CHECK(r.is_bijection);
    }
    const auto& av = find_problem("dyck_to_av321");
    const auto reports = verify_bijection(exec, read_program("bjs.py"), av, {1, 2, 3, 4, 5, 6, 7});
    REQUIRE(reports.size() == 7);
    for (const auto& r : reports) CHECK(r.is_bijection);

    const auto constant = verify_bijection(exec, read_program("constant.py"), find_problem("area_bounce"), {3});
    CHECK_FALSE(constant[0].is_bijection);
    CHECK(constant[0].empirical.surjectivity == Rational(1, 5));

    SUBCASE("stack insertion reaches 13 of 14 targets at n = 4") {
        const auto r = verify_bijection(exec, read_program("stack_insertion.py"), av, {4});
        CHECK(r[0].empirical.surjectivity == Rational(13, 14));
        CHECK(r[0].empirical.validity == Rational(1));
        CHECK_FALSE(r[0].is_bijection);
    }
    SUBCASE("executor failures become error records") {
        const auto r = verify_bijection(exec, "def f(x): pass", av, {3});
        CHECK_FALSE(r[0].is_bijection);
        CHECK(r[0].empirical.defined_fraction == Rational(0));
    }
    CHECK_THROWS_AS(verify_bijection(exec, read_program("bjs.py"), av, {40}), ResourceLimit);
}

TEST_CASE("native executor") {
    NativeExecutor exec;
    const auto inputs = Family::parse("dyck").enumerate(2);

    SUBCASE("identity echoes inputs") {
        const auto reply = exec.execute({read_program("identity.py"), inputs, {}});
        REQUIRE(reply.syntax_ok);
        REQUIRE(reply.records.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(reply.records[i].status == RecordStatus::ok);
            CHECK(reply.records[i].output == inputs[i]);
            CHECK(reply.records[i].input_index == static_cast<int>(i));
        }
    }
    SUBCASE("raising source yields error records") {
        const auto reply = exec.execute({"# kernel: raise\n", inputs, {}});
        for (const auto& r : reply.records) {
            CHECK(r.status == RecordStatus::error);
            CHECK_FALSE(r.output.has_value());
        }
    }
    SUBCASE("unbound source fails the syntax check") {
        const auto reply = exec.execute({"def bijection(p):\n    return p\n", inputs, {}});
        CHECK_FALSE(reply.syntax_ok);
        CHECK(reply.records.empty());
        CHECK_FALSE(exec.execute({"   \n", inputs, {}}).syntax_ok);
        CHECK_FALSE(exec.execute({"# kernel: nope", inputs, {}}).syntax_ok);
    }
    SUBCASE("slow inputs time out and the batch deadline holds") {
        ExecutionLimits limits{.per_input_timeout_ms = 5, .total_timeout_ms = 60, .memory_limit_mb = 64};
        const auto many = Family::parse("dyck").enumerate(4);
        const auto start = std::chrono::steady_clock::now();
        const auto reply = exec.execute_serial({"# kernel: sleep 20", many, limits});
        const auto elapsed = std::chrono::steady_clock::now() - start;
        REQUIRE(reply.records.size() == many.size());
        for (const auto& r : reply.records) CHECK(r.status == RecordStatus::timeout);
        CHECK(elapsed < std::chrono::milliseconds(60 + 20 + 50));
    }
    SUBCASE("parallel and serial paths agree") {
        for (const auto* src : {"# kernel: bjs", "# kernel: stack_insertion", "# kernel: zeta", "# kernel: raise",
                                "# kernel: area_bounce_fixed_points", "# kernel: oda_to_dyck"}) {
            const auto domain = Family::parse("dyck").enumerate(6);
            const auto a = exec.execute_serial({src, domain, {}});
            const auto b = exec.execute_parallel({src, domain, {}});
            CHECK(a.records == b.records);
        }
    }
    CHECK_THROWS_AS(exec.execute({"# kernel: identity", {}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(exec.execute({"# kernel: identity", inputs, {0, 1, 1}}), std::invalid_argument);
    CHECK(find_kernel_binding("x = 1\n# kernel: constant 1010\n")->arg == "1010");
}

TEST_CASE("static cheat scan") {
    for (const auto* name : {"oda_to_dyck.py", "bjs.py", "stack_insertion.py", "area_bounce_seed.py", "identity.py"}) {
        CAPTURE(name);
        CHECK(static_cheat_scan(read_program(name)).empty());
    }
    CHECK(static_cheat_scan("").empty());

    const auto enum_flags = static_cheat_scan(
        "def bijection(path):\n"
        "    targets = generate_all_dyck_paths(len(path) // 2)\n"
        "    sources = all_paths(len(path))\n"
        "    return targets[sources.index(path)]\n");
    REQUIRE(enum_flags.size() >= 3);
    CHECK(enum_flags[0].kind == CheatKind::codomain_enumeration);
    CHECK(enum_flags[0].line == 2);
    CHECK(std::any_of(enum_flags.begin(), enum_flags.end(),
                      [](const CheatFlag& f) { return f.kind == CheatKind::index_pairing && f.line == 4; }));

    const auto search = static_cheat_scan("from collections import deque\nqueue = deque([start])\n");
    REQUIRE_FALSE(search.empty());
    CHECK(search[0].kind == CheatKind::exhaustive_search);
    CHECK(static_cheat_scan("for p in itertools.permutations(range(n)):\n")[0].kind == CheatKind::codomain_enumeration);
}
