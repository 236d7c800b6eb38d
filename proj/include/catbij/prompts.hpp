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

#include <string>
#include <utility>
#include <vector>

#include "catbij/cheat_scan.hpp"
#include "catbij/llm.hpp"
#include "catbij/problem.hpp"
#include "catbij/program.hpp"
#include "catbij/scoring.hpp"

namespace catbij {

// Prompt builders are pure: identical inputs give byte-identical text.

/// Rewrite prompt for one parent, with optional inspiration programs. The
/// inspiration section is omitted when the list is empty.
ChatRequest build_evolution_prompt(const ProblemSpec& problem, const CandidateProgram& parent,
                                   const Evaluation& parent_eval,
                                   const std::vector<std::pair<CandidateProgram, Evaluation>>& inspirations);

/// Judge prompt asking for cheating, faithfulness and simplicity scores in a
/// single JSON block. Static-scan flags are listed as advisory context.
ChatRequest build_judge_prompt(const ProblemSpec& problem, const CandidateProgram& candidate,
                               const EmpiricalScores& empirical, const std::vector<CheatFlag>& flags = {});

/// Wraps source in a python code fence; parse_program_response inverts it.
std::string render_program_block(const std::string& source);

}  // namespace catbij
