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

#include "catbij/scoring.hpp"

#include <stdexcept>
#include <unordered_set>

namespace catbij {

EmpiricalScores empirical_scores(const std::vector<OutputRecord>& records, const std::set<std::string>& codomain,
                                 std::size_t domain_size) {
    if (records.size() != domain_size) {
        throw std::invalid_argument("expected " + std::to_string(domain_size) + " records, got " +
                                    std::to_string(records.size()));
    }
    if (codomain.empty()) throw std::invalid_argument("codomain must be nonempty");
    if (domain_size == 0) throw std::invalid_argument("domain must be nonempty");

    std::unordered_set<std::string_view> distinct;
    std::unordered_set<std::string_view> hit;
    std::int64_t ok_count = 0;
    std::int64_t valid_count = 0;
    for (const auto& r : records) {
        if (r.status != RecordStatus::ok || !r.output) continue;
        ++ok_count;
        const std::string_view out = *r.output;
        distinct.insert(out);
        if (codomain.contains(*r.output)) {
            ++valid_count;
            hit.insert(out);
        }
    }

    EmpiricalScores s;
    s.surjectivity = Rational(static_cast<std::int64_t>(hit.size()), static_cast<std::int64_t>(codomain.size()));
    if (ok_count == 0) {
        s.injectivity = Rational(1);
        s.validity = Rational(1);
    } else {
        s.injectivity = Rational(static_cast<std::int64_t>(distinct.size()), ok_count);
        s.validity = Rational(valid_count, ok_count);
    }
    s.combined = (s.surjectivity + s.injectivity + s.validity) / Rational(3);
    s.defined_fraction = Rational(ok_count, static_cast<std::int64_t>(domain_size));
    return s;
}

Rational final_score(const EmpiricalScores& empirical, const std::optional<JudgeScores>& judge,
                     const Rational& judge_weight) {
    if (judge_weight < Rational(0) || judge_weight > Rational(1)) {
        throw std::invalid_argument("judge weight must lie in [0, 1]");
    }
    if (!judge) return empirical.combined;
    if (judge->cheating == Rational(0)) return Rational(0);
    return judge_weight * judge->mean() + (Rational(1) - judge_weight) * empirical.combined;
}

namespace {

struct ExhaustiveRun {
    std::vector<OutputRecord> records;
    bool syntax_ok = true;
    std::string diagnostic;
};

ExhaustiveRun run_exhaustive(CandidateExecutor& executor, const std::string& source,
                             const std::vector<std::string>& inputs, const ExecutionLimits& limits) {
    ExhaustiveRun run;
    auto fail_all = [&](const std::string& why) {
        run.records.clear();
        for (std::size_t i = 0; i < inputs.size(); ++i) run.records.push_back(OutputRecord::error(static_cast<int>(i), why));
        run.diagnostic = why;
    };
    try {
        auto reply = executor.execute(ExecutionRequest{source, inputs, limits});
        if (!reply.syntax_ok) {
            run.syntax_ok = false;
            fail_all("syntax error: " + reply.message);
        } else if (reply.records.size() != inputs.size()) {
            fail_all("executor returned " + std::to_string(reply.records.size()) + " records for " +
                     std::to_string(inputs.size()) + " inputs");
        } else {
            run.records = std::move(reply.records);
        }
    } catch (const std::exception& e) {
        fail_all(std::string("executor failure: ") + e.what());
    }
    return run;
}

}  // namespace

EvaluationOutcome evaluate_at(CandidateExecutor& executor, const std::string& source, const ProblemSpec& problem,
                              int n, const ExecutionLimits& limits, EnumerationBound bound) {
    problem.check_size(n, bound);
    const auto domain = problem.domain_at(n, bound);
    const auto codomain_list = problem.codomain_at(n, bound);
    const std::set<std::string> codomain(codomain_list.begin(), codomain_list.end());

    auto run = run_exhaustive(executor, source, domain, limits);
    EvaluationOutcome outcome;
    outcome.syntax_ok = run.syntax_ok;
    outcome.diagnostic = std::move(run.diagnostic);
    auto& ev = outcome.evaluation;
    ev.empirical = empirical_scores(run.records, codomain, domain.size());
    ev.final_score = ev.empirical.combined;
    ev.n_eval = n;
    ev.records = std::move(run.records);
    return outcome;
}

std::vector<SizeReport> verify_bijection(CandidateExecutor& executor, const std::string& source,
                                         const ProblemSpec& problem, const std::vector<int>& sizes,
                                         const ExecutionLimits& limits, EnumerationBound bound) {
    for (int n : sizes) problem.check_size(n, bound);
    std::vector<SizeReport> reports;
    for (int n : sizes) {
        const auto outcome = evaluate_at(executor, source, problem, n, limits, bound);
        const auto& e = outcome.evaluation.empirical;
        SizeReport r;
        r.size = n;
        r.empirical = e;
        r.domain_size = outcome.evaluation.records.size();
        r.codomain_size = problem.codomain_at(n, bound).size();
        r.is_bijection = e.surjectivity == Rational(1) && e.injectivity == Rational(1) &&
                         e.validity == Rational(1) && e.defined_fraction == Rational(1);
        reports.push_back(r);
    }
    return reports;
}

}  // namespace catbij
