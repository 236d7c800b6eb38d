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

#include "catbij/engine.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "catbij/cheat_scan.hpp"
#include "catbij/parse.hpp"
#include "catbij/problem.hpp"
#include "catbij/prompts.hpp"
#include "catbij/serialize.hpp"

namespace catbij {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kStateVersion = 1;

enum StreamTag : std::uint32_t { kModelStream = 1, kIslandStream = 2 };

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t tag, std::uint32_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag, index};
    return std::mt19937_64(seq);
}

std::string rng_text(const std::mt19937_64& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

std::mt19937_64 rng_from_text(const std::string& text) {
    std::istringstream is(text);
    std::mt19937_64 rng;
    is >> rng;
    if (!is) throw RunIOError("corrupt random generator state in state.json");
    return rng;
}

// Config echo for the log header, minus per-session controls, so a resumed
// run logs the same header as an uninterrupted one.
json run_identity(const RunConfig& config) {
    auto j = config_to_json(config);
    j.erase("iterations");
    j.erase("snapshot_every");
    return j;
}

long long ms_since(Clock::time_point t) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t).count();
}

json reports_to_json(const std::vector<SizeReport>& reports) {
    json out = json::array();
    for (const auto& r : reports) {
        out.push_back({{"size", r.size},
                       {"is_bijection", r.is_bijection},
                       {"domain_size", r.domain_size},
                       {"codomain_size", r.codomain_size},
                       {"empirical", r.empirical}});
    }
    return out;
}

std::vector<SizeReport> reports_from_json(const json& j) {
    std::vector<SizeReport> out;
    for (const auto& r : j) {
        SizeReport s;
        s.size = r.at("size").get<int>();
        s.is_bijection = r.at("is_bijection").get<bool>();
        s.domain_size = r.at("domain_size").get<std::size_t>();
        s.codomain_size = r.at("codomain_size").get<std::size_t>();
        s.empirical = r.at("empirical").get<EmpiricalScores>();
        out.push_back(s);
    }
    return out;
}

/// Everything a run carries between iterations; state.json is its image.
class Session {
public:
    Session(const RunConfig& config, ChatClient& client, CandidateExecutor& executor, const fs::path& dir)
        : config_(config),
          client_(client),
          executor_(executor),
          paths_{dir},
          problem_(find_problem(config.problem)),
          n_train_(config.n_train.value_or(problem_.n_train)),
          n_verify_(config.n_verify.value_or(problem_.n_verify)),
          model_rng_(stream(config.rng_seed, kModelStream)) {
        for (int i = 0; i < config.islands; ++i)
            island_rng_.push_back(stream(config.rng_seed, kIslandStream, static_cast<std::uint32_t>(i)));
    }

    void start_fresh() {
        config_.validate();
        if (fs::exists(paths_.log())) throw RunIOError("run directory already holds a run: " + paths_.dir.string());
        fs::create_directories(paths_.dir);
        {
            auto doc = config_to_json(config_);
            if (config_.all_mock()) doc["mock_script"] = config_.mock_script;
            std::ofstream cfg(paths_.config());
            cfg << doc.dump(2) << '\n';
        }
        open_logs(false);
        append(log_, {{"kind", "header"},
                      {"schema", kRunLogSchema},
                      {"problem", problem_.name},
                      {"n_train", n_train_},
                      {"n_verify", n_verify_},
                      {"config", run_identity(config_)}});
        timing_event("start");

        for (int island = 0; island < config_.islands; ++island) archives_.emplace_back(island, config_.descriptor);
        for (int island = 0; island < config_.islands; ++island) {
            for (const auto& seed : config_.seeds[static_cast<std::size_t>(island)]) {
                if (verified_) break;
                add_seed(island, seed);
            }
        }
        snapshot();
    }

    void load_existing() {
        std::ifstream in(paths_.state());
        if (!in) throw RunIOError("no state.json in run directory " + paths_.dir.string());
        json st;
        try {
            st = json::parse(in);
        } catch (const json::exception& e) {
            throw RunIOError(std::string("state.json is not valid JSON: ") + e.what());
        }
        if (st.value("version", 0) != kStateVersion) throw RunIOError("unsupported state.json version");
        const auto problem = st.at("problem").get<std::string>();
        if (problem != config_.problem)
            throw ConfigError(fmt::format("run directory holds problem '{}' but the config names '{}'", problem,
                                          config_.problem));
        const int islands = st.at("islands").get<int>();
        if (islands != config_.islands)
            throw ConfigError(fmt::format("run directory has {} islands but the config names {}", islands,
                                          config_.islands));
        iterations_done_ = st.at("iterations_done").get<int>();
        next_id_ = st.at("next_id").get<std::uint64_t>();
        chat_calls_ = st.at("chat_calls").get<std::size_t>();
        model_rng_ = rng_from_text(st.at("rng").at("model").get<std::string>());
        island_rng_.clear();
        for (const auto& r : st.at("rng").at("islands")) island_rng_.push_back(rng_from_text(r.get<std::string>()));
        if (!st.at("verified").is_null()) {
            const auto& v = st["verified"];
            verified_ = VerifiedProgram{v.at("program").get<CandidateProgram>(), reports_from_json(v.at("reports"))};
        }
        archives_.clear();
        for (int i = 0; i < islands; ++i) archives_.push_back(Archive::restore(paths_.archive(i).string()));
        client_.resume_from(chat_calls_);

        if (verified_) return;
        // Drop anything logged after the snapshot we resume from.
        fs::resize_file(paths_.log(), st.at("log_bytes").get<std::uintmax_t>());
        fs::resize_file(paths_.timing(), st.at("timing_bytes").get<std::uintmax_t>());
        open_logs(true);
        timing_event("resume");
    }

    RunResult iterate_until(int target, const std::atomic<bool>* stop) {
        bool interrupted = false;
        while (!verified_ && iterations_done_ < target) {
            if (stop && stop->load()) {
                interrupted = true;
                break;
            }
            iteration(iterations_done_ + 1);
            ++iterations_done_;
            if (iterations_done_ % config_.snapshot_every == 0) snapshot();
        }
        if (log_.is_open()) {
            snapshot();
            const std::string reason = verified_ ? "verified" : interrupted ? "interrupted" : "iteration_cap";
            append(log_, {{"kind", "stop"}, {"reason", reason}, {"iterations_done", iterations_done_}});
        }
        return result(interrupted);
    }

    RunResult result(bool interrupted) const {
        RunResult r;
        for (const auto& a : archives_) {
            const Elite* b = a.best();
            r.best_per_island.push_back(b ? std::optional<Elite>(*b) : std::nullopt);
        }
        r.verified = verified_;
        r.iterations_done = iterations_done_;
        r.chat_calls = chat_calls_;
        r.interrupted = interrupted;
        r.run_dir = paths_.dir;
        r.log_path = paths_.log();
        return r;
    }

private:
    void open_logs(bool append_mode) {
        const auto mode = append_mode ? std::ios::app : std::ios::trunc;
        log_.open(paths_.log(), std::ios::out | mode);
        timing_.open(paths_.timing(), std::ios::out | mode);
        if (!log_ || !timing_) throw RunIOError("cannot open run log in " + paths_.dir.string());
    }

    void append(std::ofstream& out, const json& record) {
        out << record.dump() << '\n';
        out.flush();
        if (!out) throw RunIOError("failed writing the run log in " + paths_.dir.string());
    }

    void timing_event(const std::string& event) {
        append(timing_, {{"kind", "session"},
                         {"event", event},
                         {"time", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)))}});
    }

    std::string new_id() { return fmt::format("c{:05d}", next_id_++); }

    void snapshot() {
        for (const auto& a : archives_) a.snapshot(paths_.archive(a.island()).string());
        json islands = json::array();
        for (const auto& r : island_rng_) islands.push_back(rng_text(r));
        json st = {{"version", kStateVersion},
                   {"problem", problem_.name},
                   {"islands", config_.islands},
                   {"iterations_done", iterations_done_},
                   {"next_id", next_id_},
                   {"chat_calls", chat_calls_},
                   {"log_bytes", fs::file_size(paths_.log())},
                   {"timing_bytes", fs::file_size(paths_.timing())},
                   {"rng", {{"model", rng_text(model_rng_)}, {"islands", islands}}}};
        st["verified"] = verified_ ? json{{"program", verified_->program}, {"reports", reports_to_json(verified_->reports)}}
                                   : json(nullptr);
        const auto tmp = paths_.state().string() + ".tmp";
        {
            std::ofstream out(tmp);
            out << st.dump(1) << '\n';
            if (!out) throw RunIOError("cannot write " + tmp);
        }
        fs::rename(tmp, paths_.state());
    }

    void add_seed(int island, const SeedProgram& seed) {
        CandidateProgram p;
        p.id = new_id();
        p.source = seed.source;
        p.docstring = extract_docstring(seed.source);
        p.island = island;
        p.model_name = "seed";
        auto outcome = evaluate_at(executor_, p.source, problem_, n_train_, config_.limits);
        if (!outcome.syntax_ok || !outcome.diagnostic.empty())
            throw SeedError(fmt::format("seed {} ({}) failed: {}", p.id, seed.label, outcome.diagnostic));
        const auto inserted = archives_[static_cast<std::size_t>(island)].insert(p, outcome.evaluation);
        json rec = {{"kind", "seed"},
                    {"iteration", 0},
                    {"island", island},
                    {"candidate_id", p.id},
                    {"candidate", {{"source", p.source}, {"docstring", p.docstring}}},
                    {"evaluation", outcome.evaluation},
                    {"insert_outcome", std::string(to_string(inserted))}};
        if (auto v = maybe_verify(p, outcome.evaluation)) rec["verification"] = *v;
        append(log_, rec);
    }

    /// Runs verify_bijection when the training scores are perfect; records
    /// the program as verified when every size passes.
    std::optional<json> maybe_verify(const CandidateProgram& p, const Evaluation& e) {
        const auto& s = e.empirical;
        if (s.combined != Rational(1) || s.defined_fraction != Rational(1)) return std::nullopt;
        if (e.judge && e.judge->cheating == Rational(0)) return std::nullopt;
        auto reports = verify_bijection(executor_, p.source, problem_, n_verify_, config_.limits);
        const bool all = std::all_of(reports.begin(), reports.end(), [](const SizeReport& r) { return r.is_bijection; });
        json out = {{"verified", all}, {"sizes", reports_to_json(reports)}};
        if (all) verified_ = VerifiedProgram{p, std::move(reports)};
        return out;
    }

    ChatResponse chat(const ChatRequest& req, const ModelSpec& model) {
        ++chat_calls_;
        return client_.complete(req, model);
    }

    void iteration(int it) {
        const auto wall_start = Clock::now();
        const int island = (it - 1) % config_.islands;
        auto& archive = archives_[static_cast<std::size_t>(island)];
        auto& rng = island_rng_[static_cast<std::size_t>(island)];

        json rec = {{"kind", "iteration"},
                    {"iteration", it},
                    {"island", island},
                    {"island_iteration", (it - 1) / config_.islands + 1}};
        json timing = {{"iteration", it}, {"island", island}};

        const Elite& parent = archive.sample_parent(rng);
        const auto inspirations = archive.sample_inspirations(config_.inspiration_k, parent.program.id, rng);
        const ModelSpec& model = sample_model(config_.ensemble, model_rng_);
        rec["parent_id"] = parent.program.id;
        json insp_ids = json::array();
        std::vector<std::pair<CandidateProgram, Evaluation>> insp;
        for (const auto* e : inspirations) {
            insp_ids.push_back(e->program.id);
            insp.emplace_back(e->program, e->evaluation);
        }
        rec["inspiration_ids"] = insp_ids;
        rec["model_name"] = model.name;

        auto finish = [&](const std::string& status, const std::string& error = {}) {
            rec["status"] = status;
            if (!error.empty()) rec["error"] = error;
            const Elite* best = archive.best();
            rec["island_best"] = best ? json(best->score()) : json(nullptr);
            append(log_, rec);
            timing["wall_ms"] = ms_since(wall_start);
            append(timing_, timing);
        };

        const auto prompt = build_evolution_prompt(problem_, parent.program, parent.evaluation, insp);
        ChatResponse response;
        try {
            const auto t = Clock::now();
            response = chat(prompt, model);
            timing["chat_ms"] = ms_since(t);
        } catch (const ChatFailure& f) {
            return finish("chat_error", fmt::format("{}: {}", to_string(f.kind()), f.what()));
        }
        rec["usage"] = {{"prompt_tokens", response.usage.prompt_tokens},
                        {"completion_tokens", response.usage.completion_tokens}};

        ProgramText text;
        try {
            text = parse_program_response(response.text);
        } catch (const ResponseParseError& e) {
            return finish("parse_error", e.what());
        }

        CandidateProgram cand;
        cand.id = new_id();
        cand.source = text.source;
        cand.docstring = text.docstring;
        cand.parent_id = parent.program.id;
        cand.island = island;
        cand.iteration = it;
        cand.model_name = model.name;
        rec["candidate_id"] = cand.id;
        rec["candidate"] = {{"source", cand.source}, {"docstring", cand.docstring}};

        const auto flags = static_cheat_scan(cand.source);
        json flag_json = json::array();
        for (const auto& f : flags)
            flag_json.push_back({{"kind", std::string(to_string(f.kind))}, {"line", f.line}, {"evidence", f.evidence}});
        rec["cheat_flags"] = flag_json;

        const auto t_eval = Clock::now();
        auto outcome = evaluate_at(executor_, cand.source, problem_, n_train_, config_.limits);
        timing["eval_ms"] = ms_since(t_eval);
        if (!outcome.syntax_ok) return finish("syntax_error", outcome.diagnostic);
        if (!outcome.diagnostic.empty()) return finish("executor_error", outcome.diagnostic);
        auto& eval = outcome.evaluation;

        if (config_.judge_enabled()) {
            const auto t_judge = Clock::now();
            const auto req = build_judge_prompt(problem_, cand, eval.empirical, flags);
            std::vector<JudgeScores> samples;
            json problems = json::array();
            for (int i = 0; i < config_.judge_samples; ++i) {
                try {
                    auto parsed = parse_judge_response(chat(req, *config_.judge).text);
                    for (auto& w : parsed.warnings) problems.push_back(w);
                    samples.push_back(std::move(parsed.scores));
                } catch (const ChatFailure& f) {
                    problems.push_back(fmt::format("{}: {}", to_string(f.kind()), f.what()));
                } catch (const ResponseParseError& e) {
                    problems.push_back(e.what());
                }
            }
            timing["judge_ms"] = ms_since(t_judge);
            rec["judge_status"] = samples.empty() ? "error" : "ok";
            if (!problems.empty()) rec["judge_warnings"] = problems;
            if (!samples.empty()) eval.judge = median_judge(samples);
        } else {
            rec["judge_status"] = "skipped";
        }
        eval.final_score = final_score(eval.empirical, eval.judge, config_.judge_weight);
        rec["evaluation"] = eval;

        rec["insert_outcome"] = std::string(to_string(archive.insert(cand, eval)));
        if (auto v = maybe_verify(cand, eval)) rec["verification"] = *v;
        finish("ok");
    }

    RunConfig config_;
    ChatClient& client_;
    CandidateExecutor& executor_;
    RunPaths paths_;
    const ProblemSpec& problem_;
    int n_train_;
    std::vector<int> n_verify_;

    std::vector<Archive> archives_;
    std::vector<std::mt19937_64> island_rng_;
    std::mt19937_64 model_rng_;
    int iterations_done_ = 0;
    std::uint64_t next_id_ = 0;
    std::size_t chat_calls_ = 0;
    std::optional<VerifiedProgram> verified_;
    std::ofstream log_;
    std::ofstream timing_;
};

}  // namespace

fs::path default_run_dir(const RunConfig& config) {
    const auto stamp = fmt::format("{:%Y%m%dT%H%M%SZ}", fmt::gmtime(std::time(nullptr)));
    return fs::path(config.out_dir) / fmt::format("{}-s{}", stamp, config.rng_seed);
}

std::vector<Archive> seed_population(const RunConfig& config, CandidateExecutor& executor) {
    config.validate();
    const auto& problem = find_problem(config.problem);
    const int n = config.n_train.value_or(problem.n_train);
    std::vector<Archive> archives;
    int next = 0;
    for (int island = 0; island < config.islands; ++island) {
        archives.emplace_back(island, config.descriptor);
        for (const auto& seed : config.seeds[static_cast<std::size_t>(island)]) {
            CandidateProgram p;
            p.id = fmt::format("c{:05d}", next++);
            p.source = seed.source;
            p.docstring = extract_docstring(seed.source);
            p.island = island;
            p.model_name = "seed";
            const auto outcome = evaluate_at(executor, p.source, problem, n, config.limits);
            if (!outcome.syntax_ok || !outcome.diagnostic.empty())
                throw SeedError(fmt::format("seed {} ({}) failed: {}", p.id, seed.label, outcome.diagnostic));
            archives.back().insert(p, outcome.evaluation);
        }
    }
    return archives;
}

RunResult run(const RunConfig& config, ChatClient& client, CandidateExecutor& executor, const fs::path& run_dir,
              const std::atomic<bool>* stop) {
    Session s(config, client, executor, run_dir);
    s.start_fresh();
    return s.iterate_until(config.iterations, stop);
}

RunResult resume(const RunConfig& config, ChatClient& client, CandidateExecutor& executor, const fs::path& run_dir,
                 int extra_iterations, const std::atomic<bool>* stop) {
    if (extra_iterations < 0) throw ConfigError("extra iterations must be nonnegative");
    Session s(config, client, executor, run_dir);
    s.load_existing();
    const int target = s.result(false).iterations_done + extra_iterations;
    return s.iterate_until(target, stop);
}

}  // namespace catbij
