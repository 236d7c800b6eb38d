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

#include <json.hpp>

#include "catbij/executor.hpp"
#include "catbij/program.hpp"
#include "catbij/rational.hpp"
#include "catbij/scoring.hpp"

namespace catbij {

/// Rationals travel as exact "n/d" text.
Rational parse_rational(std::string_view text);

void to_json(nlohmann::json& j, const Rational& r);
void from_json(const nlohmann::json& j, Rational& r);

void to_json(nlohmann::json& j, const OutputRecord& r);
void from_json(const nlohmann::json& j, OutputRecord& r);

void to_json(nlohmann::json& j, const CandidateProgram& p);
void from_json(const nlohmann::json& j, CandidateProgram& p);

void to_json(nlohmann::json& j, const EmpiricalScores& s);
void from_json(const nlohmann::json& j, EmpiricalScores& s);

void to_json(nlohmann::json& j, const JudgeScores& s);
void from_json(const nlohmann::json& j, JudgeScores& s);

/// Records are included only when `with_records`.
nlohmann::json evaluation_to_json(const Evaluation& e, bool with_records = true);
void to_json(nlohmann::json& j, const Evaluation& e);
void from_json(const nlohmann::json& j, Evaluation& e);

void to_json(nlohmann::json& j, const ExecutionLimits& l);
void from_json(const nlohmann::json& j, ExecutionLimits& l);

}  // namespace catbij
