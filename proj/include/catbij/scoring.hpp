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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "catbij/executor.hpp"
#include "catbij/problem.hpp"
#include "catbij/rational.hpp"

namespace catbij {

struct EmpiricalScores {
    Rational surjectivity;
    Rational injectivity;
    Rational validity;
    Rational combined;
    Rational defined_fraction;

    friend bool operator==(const EmpiricalScores&, const EmpiricalScores&) = default;
};

/// Judge verdict. cheating == 0 means cheating was detected.
struct JudgeScores {
    Rational cheating;
    Rational faithfulness;
    Rational simplicity;
    std::string reasoning;
    std::string suggestions;

    Rational mean() const { return (cheating + faithfulness + simplicity) / Rational(3); }
};

struct Evaluation {
    EmpiricalScores empirical;
    std::optional<JudgeScores> judge;
    Rational final_score;
    int n_eval = 0;
    std::vector<OutputRecord> records;
};

/// Graded bijectivity over one exhaustive run.
///
/// Only ok records contribute to the image. Surjectivity counts distinct
/// outputs that belong to the codomain; injectivity is distinct / total ok
/// outputs and validity in-codomain / total ok outputs, both 1 when nothing
/// was output. Throws std::invalid_argument when the record count differs
/// from domain_size or the codomain is empty.
EmpiricalScores empirical_scores(const std::vector<OutputRecord>& records, const std::set<std::string>& codomain,
                                 std::size_t domain_size);

/// w * mean(judge) + (1 - w) * combined; a zero cheating score forces 0.
Rational final_score(const EmpiricalScores& empirical, const std::optional<JudgeScores>& judge,
                     const Rational& judge_weight);

struct SizeReport {
    int size = 0;
    bool is_bijection = false;
    EmpiricalScores empirical;
    std::size_t domain_size = 0;
    std::size_t codomain_size = 0;
};

/// Runs `source` exhaustively at each size. Executor failures become error
/// records and never abort the report.
std::vector<SizeReport> verify_bijection(CandidateExecutor& executor, const std::string& source,
                                         const ProblemSpec& problem, const std::vector<int>& sizes,
                                         const ExecutionLimits& limits = {}, EnumerationBound bound = {});

struct EvaluationOutcome {
    Evaluation evaluation;
    bool syntax_ok = true;
    std::string diagnostic;
};

/// Runs `source` on the domain at n and scores the result (judge absent,
/// final = combined). A syntax failure or executor failure yields error
/// records for every input and syntax_ok / diagnostic set accordingly.
EvaluationOutcome evaluate_at(CandidateExecutor& executor, const std::string& source, const ProblemSpec& problem, int n,
                       const ExecutionLimits& limits = {}, EnumerationBound bound = {});

}  // namespace catbij
