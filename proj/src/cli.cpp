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

#include "catbij/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "catbij/analysis.hpp"
#include "catbij/config.hpp"
#include "catbij/engine.hpp"
#include "catbij/native_executor.hpp"
#include "catbij/serialize.hpp"
#include "catbij/subprocess_executor.hpp"

namespace catbij {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations;
    std::optional<int> islands;
    std::optional<std::string> judge_weight;
    bool offline = false;
    std::optional<std::string> out_dir;
};

void apply(RunConfig& c, const RunOverrides& o) {
    if (o.seed) c.rng_seed = *o.seed;
    if (o.iterations) c.iterations = *o.iterations;
    if (o.islands && *o.islands != c.islands) {
        if (*o.islands < 1) throw ConfigError("--islands must be at least 1");
        for (const auto& s : c.seeds)
            if (s.size() != c.seeds.front().size() ||
                !std::equal(s.begin(), s.end(), c.seeds.front().begin(),
                            [](const SeedProgram& a, const SeedProgram& b) { return a.source == b.source; }))
                throw ConfigError("--islands needs the config to share one seed list across islands");
        const auto shared = c.seeds.empty() ? std::vector<SeedProgram>{} : c.seeds.front();
        c.islands = *o.islands;
        c.seeds.assign(static_cast<std::size_t>(c.islands), shared);
    }
    if (o.judge_weight) {
        try {
            const auto& w = *o.judge_weight;
            c.judge_weight = w.find('/') != std::string::npos ? parse_rational(w) : Rational::from_double(std::stod(w));
        } catch (const std::exception&) {
            throw ConfigError("--judge-weight: expected a number or n/d, got '" + *o.judge_weight + "'");
        }
    }
    if (o.offline) {
        if (c.mock_script.empty()) throw ConfigError("--offline needs a mock_script in the config");
        for (auto& m : c.ensemble) m.endpoint = "mock";
        if (c.judge) c.judge->endpoint = "mock";
    }
    if (o.out_dir) c.out_dir = *o.out_dir;
    c.validate();
}

std::unique_ptr<ChatClient> make_client(const RunConfig& c) {
    if (c.all_mock()) {
        try {
            return std::make_unique<ScriptedClient>(ScriptedClient::from_file(c.mock_script));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(std::string("mock_script: ") + e.what());
        }
    }
    return std::make_unique<HttpChatClient>();
}

std::unique_ptr<CandidateExecutor> make_executor(const ExecutorConfig& e) {
    if (e.kind == "subprocess") {
        SubprocessOptions o;
        o.argv = e.argv;
        o.grace = std::chrono::milliseconds(e.grace_ms);
        return std::make_unique<SubprocessExecutor>(o);
    }
    return std::make_unique<NativeExecutor>();
}

void print_result(const RunResult& r, std::ostream& out) {
    for (std::size_t i = 0; i < r.best_per_island.size(); ++i) {
        const auto& best = r.best_per_island[i];
        if (best)
            out << fmt::format("island {}: best {} final {} ({:.6f})\n", i, best->program.id,
                               best->score().str(), best->score().to_double());
        else
            out << fmt::format("island {}: empty\n", i);
    }
    if (r.verified)
        out << fmt::format("verified: {} is a bijection at every verification size\n", r.verified->program.id);
    else
        out << "not verified\n";
    out << fmt::format("iterations: {}  chat calls: {}\n", r.iterations_done, r.chat_calls);
    out << "log: " << r.log_path.string() << '\n';
}

int finish_run(const RunResult& r, std::ostream& out, std::ostream& err) {
    print_result(r, out);
    if (r.interrupted) {
        err << "interrupted; continue with: catbij resume " << r.run_dir.string() << " --iterations N\n";
        return kExitInterrupted;
    }
    return kExitOk;
}

std::vector<int> parse_sizes(const std::string& text) {
    std::vector<int> sizes;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) {
        const auto dash = part.find('-');
        try {
            if (dash != std::string::npos && dash > 0) {
                const int lo = std::stoi(part.substr(0, dash)), hi = std::stoi(part.substr(dash + 1));
                if (lo > hi) throw UsageError("");
                for (int n = lo; n <= hi; ++n) sizes.push_back(n);
            } else {
                sizes.push_back(std::stoi(part));
            }
        } catch (const std::exception&) {
            throw UsageError("--sizes: expected a list like 1,2,3 or 1-6, got '" + text + "'");
        }
    }
    if (sizes.empty()) throw UsageError("--sizes is empty");
    for (int n : sizes)
        if (n < 1) throw UsageError("--sizes: sizes must be positive");
    return sizes;
}

fs::path log_path_of(const std::string& target) {
    const fs::path p(target);
    return fs::is_directory(p) ? RunPaths{p}.log() : p;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const std::atomic<bool>* stop) {
    CLI::App app{"Evolutionary search for combinatorial bijections", "catbij"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "Run an evolutionary search from a config file");
    std::string config_path;
    RunOverrides ov;
    std::string run_dir;
    run_cmd->add_option("config", config_path, "Config file (JSON)")->required();
    run_cmd->add_option("--seed", ov.seed, "RNG seed");
    run_cmd->add_option("--iterations", ov.iterations, "Iteration cap");
    run_cmd->add_option("--islands", ov.islands, "Island count (shared seed list only)");
    run_cmd->add_option("--judge-weight", ov.judge_weight, "Judge weight in [0, 1], decimal or n/d");
    run_cmd->add_flag("--offline", ov.offline, "Replace every model with the config's mock script");
    run_cmd->add_option("--out-dir", ov.out_dir, "Parent directory for run directories");
    run_cmd->add_option("--run-dir", run_dir, "Exact run directory (default: <out-dir>/<timestamp>-s<seed>)");

    // resume
    auto* resume_cmd = app.add_subcommand("resume", "Continue a run from its last snapshot");
    std::string resume_dir;
    int extra = 0;
    std::string resume_config;
    bool resume_offline = false;
    resume_cmd->add_option("run_dir", resume_dir, "Run directory")->required();
    resume_cmd->add_option("--iterations", extra, "Further iterations")->required();
    resume_cmd->add_option("--config", resume_config, "Config file (default: the run's config.json)");
    resume_cmd->add_flag("--offline", resume_offline, "Replace every model with the config's mock script");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "Check a program for bijectivity at given sizes");
    std::string program_path, problem_name, sizes_text;
    std::vector<std::string> runner;
    int max_catalan = EnumerationBound{}.max_catalan_arg;
    verify_cmd->add_option("program", program_path, "Candidate source file")->required();
    verify_cmd->add_option("--problem", problem_name, "Problem name")->required();
    verify_cmd->add_option("--sizes", sizes_text, "Sizes, e.g. 1,2,3 or 1-6 (default: the problem's)");
    verify_cmd->add_option("--runner", runner, "Runner command for subprocess execution")->expected(1, -1);
    verify_cmd->add_option("--max-catalan", max_catalan, "Enumeration bound on the Catalan argument");

    // enumerate
    auto* enum_cmd = app.add_subcommand("enumerate", "Print a family's objects at size n, one per line");
    std::string family;
    int enum_n = 0;
    enum_cmd->add_option("family", family, "dyck | oda | av321 | av<pattern>")->required();
    enum_cmd->add_option("n", enum_n, "Size")->required();

    // report
    auto* report_cmd = app.add_subcommand("report", "Write analysis tables for a run");
    std::string report_target, report_kind, report_out, embed_endpoint, embed_model = "text-embedding-3-large",
                                                                         embed_key_env = "OPENAI_API_KEY";
    bool fallback = false, report_offline = false;
    std::size_t dims = 2;
    report_cmd->add_option("log", report_target, "Run directory or run.jsonl")->required();
    report_cmd->add_option("--kind", report_kind, "progression | groups | embedding")
        ->required()
        ->check(CLI::IsMember({"progression", "groups", "embedding"}));
    report_cmd->add_option("--out", report_out, "Output directory (default: next to the log)");
    report_cmd->add_flag("--fallback-embeddings", fallback, "Use offline trigram embeddings");
    report_cmd->add_flag("--offline", report_offline, "Never contact an embedding service");
    report_cmd->add_option("--embed-endpoint", embed_endpoint, "OpenAI-compatible base URL for embeddings");
    report_cmd->add_option("--embed-model", embed_model, "Embedding model name");
    report_cmd->add_option("--embed-key-env", embed_key_env, "Environment variable holding the embedding API key");
    report_cmd->add_option("--dims", dims, "PCA output dimensions")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (e.get_exit_code() == 0) return kExitOk;
        err << "run 'catbij --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) {
            RunConfig c = load_config(config_path);
            apply(c, ov);
            auto client = make_client(c);
            auto executor = make_executor(c.executor);
            const fs::path dir = run_dir.empty() ? default_run_dir(c) : fs::path(run_dir);
            out << "run directory: " << dir.string() << '\n';
            return finish_run(run(c, *client, *executor, dir, stop), out, err);
        }

        if (resume_cmd->parsed()) {
            const fs::path dir(resume_dir);
            if (!fs::exists(RunPaths{dir}.state())) throw UsageError("no run snapshot in " + dir.string());
            RunConfig c = load_config(resume_config.empty() ? RunPaths{dir}.config().string() : resume_config);
            RunOverrides r;
            r.offline = resume_offline;
            apply(c, r);
            if (extra < 1) throw UsageError("--iterations must be positive");
            auto client = make_client(c);
            auto executor = make_executor(c.executor);
            return finish_run(resume(c, *client, *executor, dir, extra, stop), out, err);
        }

        if (verify_cmd->parsed()) {
            const ProblemSpec* problem = nullptr;
            try {
                problem = &find_problem(problem_name);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            const auto sizes = sizes_text.empty() ? problem->n_verify : parse_sizes(sizes_text);
            const EnumerationBound bound{max_catalan};
            try {
                for (int n : sizes) problem->check_size(n, bound);
            } catch (const ResourceLimit& e) {
                throw UsageError(e.what());
            }
            const auto source = read_text(program_path);
            ExecutorConfig ec;
            if (!runner.empty()) {
                ec.kind = "subprocess";
                ec.argv = runner;
            }
            auto executor = make_executor(ec);
            const auto reports = verify_bijection(*executor, source, *problem, sizes, ExecutionLimits{}, bound);
            out << fmt::format("{:>4} {:>8} {:>8} {:>14} {:>14} {:>14} {:>14} {}\n", "n", "domain", "codomain",
                               "surjectivity", "injectivity", "validity", "defined", "bijection");
            bool all = true;
            for (const auto& r : reports) {
                const auto& e = r.empirical;
                out << fmt::format("{:>4} {:>8} {:>8} {:>14} {:>14} {:>14} {:>14} {}\n", r.size, r.domain_size,
                                   r.codomain_size, e.surjectivity.str(), e.injectivity.str(),
                                   e.validity.str(), e.defined_fraction.str(),
                                   r.is_bijection ? "yes" : "no");
                all = all && r.is_bijection;
            }
            return all ? kExitOk : kExitNotBijection;
        }

        if (enum_cmd->parsed()) {
            std::vector<std::string> items;
            try {
                items = Family::parse(family).enumerate(enum_n);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            } catch (const std::length_error& e) {
                throw UsageError(e.what());
            }
            for (const auto& s : items) out << s << '\n';
            return kExitOk;
        }

        if (report_cmd->parsed()) {
            const auto log_path = log_path_of(report_target);
            const auto log = load_run_log(log_path.string());
            const fs::path out_dir = report_out.empty() ? log_path.parent_path() : fs::path(report_out);
            if (!out_dir.empty()) fs::create_directories(out_dir);

            if (report_kind == "progression") {
                const auto path = out_dir / "progression.csv";
                write_text(path, progression_csv(metric_progression(log)));
                out << "wrote " << path.string() << '\n';
                return kExitOk;
            }
            if (report_kind == "groups") {
                const auto g = functional_groups(log, find_problem(log.problem));
                const auto path = out_dir / "groups.json";
                write_text(path, groups_to_json(g).dump(2) + "\n");
                out << fmt::format("{} candidates at n={}: {} functional groups, {} distinct score tuples\n",
                                   log.candidates.size(), g.n, g.groups.size(), g.distinct_score_tuples);
                out << "wrote " << path.string() << '\n';
                return kExitOk;
            }

            std::unique_ptr<Embedder> embedder;
            if (fallback) {
                embedder = std::make_unique<TrigramEmbedder>();
            } else if (report_offline || embed_endpoint.empty()) {
                throw UsageError(
                    "embedding needs an embedding service (--embed-endpoint) or --fallback-embeddings for offline "
                    "trigram vectors");
            } else {
                embedder = std::make_unique<HttpEmbedder>(embed_endpoint, embed_model, embed_key_env);
            }
            if (log.candidates.size() < 2) throw UsageError("embedding needs at least two candidates in the log");
            std::vector<EmbeddingVector> vectors;
            try {
                vectors = embed_programs(log.candidates, *embedder);
            } catch (const EmbeddingError& e) {
                err << "error: " << e.what() << "\nunembedded:";
                for (const auto& id : e.unembedded_ids()) err << ' ' << id;
                err << "\nretry later or pass --fallback-embeddings\n";
                return kExitRuntime;
            }
            Matrix rows;
            for (const auto& v : vectors) rows.push_back(v.values);
            const auto pca = pca_project(rows, std::min(dims, rows.front().size()));
            std::string csv = "id,kind,island,iteration,surjectivity,final";
            for (std::size_t k = 0; k < pca.components.size(); ++k) csv += fmt::format(",pc{}", k + 1);
            csv += '\n';
            for (std::size_t i = 0; i < vectors.size(); ++i) {
                const auto& c = log.candidates[i];
                csv += fmt::format("{},{},{},{},{:.6f},{:.6f}", c.id, c.kind, c.island, c.iteration,
                                   c.evaluation.empirical.surjectivity.to_double(),
                                   c.evaluation.final_score.to_double());
                for (double x : pca.coordinates[i]) csv += fmt::format(",{:.9f}", x);
                csv += '\n';
            }
            const auto path = out_dir / "embedding.csv";
            write_text(path, csv);
            std::string ratios;
            for (double r : pca.explained_ratio) ratios += fmt::format(" {:.4f}", r);
            out << fmt::format("embedded {} programs with {}; explained variance:{}\n", vectors.size(),
                               vectors.front().provider, ratios);
            out << "wrote " << path.string() << '\n';
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SeedError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const LogError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace catbij
