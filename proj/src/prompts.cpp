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

#include "catbij/prompts.hpp"

#include <fmt/format.h>

namespace catbij {

namespace {

std::string dec(const Rational& r) { return fmt::format("{:.4f}", r.to_double()); }

std::string score_line(const Evaluation& e) {
    const auto& s = e.empirical;
    return fmt::format("surjectivity {}, injectivity {}, validity {}, combined {}, defined on {} of inputs, final {}",
                       dec(s.surjectivity), dec(s.injectivity), dec(s.validity), dec(s.combined),
                       dec(s.defined_fraction), dec(e.final_score));
}

constexpr const char* kEvolutionSystem =
    "You are an expert in enumerative and algebraic combinatorics who writes short, correct Python. "
    "You improve programs that implement bijections between families of combinatorial objects. "
    "A good bijection is a direct construction that explains why two sets have the same size.";

constexpr const char* kJudgeSystem =
    "You review Python programs that claim to implement a combinatorial bijection. "
    "You are strict, concrete, and you answer with a machine-readable score block.";

constexpr const char* kRubric =
    "Each program is run on every object of the input set at a fixed size n and scored by:\n"
    "- surjectivity: distinct valid outputs divided by the size of the output set;\n"
    "- injectivity: distinct outputs divided by the number of outputs;\n"
    "- validity: fraction of outputs that belong to the output set.\n"
    "The three are averaged. A reviewer then checks the program for cheating, for agreement between its "
    "docstring and its code, and for simplicity; a program judged to be cheating scores zero.\n";

constexpr const char* kRules =
    "- Do not generate all objects of the input set or the output set, and do not pair objects by their "
    "position in such a list. Programs that do this are treated as cheating.\n"
    "- Do not search for an output with the right properties; construct it from the input.\n"
    "- Define `bijection(obj)` taking the input as a list of integers and returning the output as a list of "
    "integers, or None when the construction does not apply to that input.\n"
    "- Start the program with a docstring that states the construction precisely; the code must do exactly "
    "what the docstring says.\n"
    "- Use only the Python standard library.\n";

}  // namespace

std::string render_program_block(const std::string& source) {
    return "```python\n" + source + "\n```";
}

ChatRequest build_evolution_prompt(const ProblemSpec& problem, const CandidateProgram& parent,
                                   const Evaluation& parent_eval,
                                   const std::vector<std::pair<CandidateProgram, Evaluation>>& inspirations) {
    std::string u;
    u += "# Problem\n" + problem.statement + "\n\n";
    if (!problem.hints.empty()) u += "# Hints\n" + problem.hints + "\n\n";
    if (!problem.steering.empty()) u += "# Directions to avoid\n" + problem.steering + "\n\n";
    u += "# Rules\n";
    u += kRules;
    u += "\n# Evaluation\n";
    u += kRubric;
    u += fmt::format("Programs are scored at n = {}.\n\n", parent_eval.n_eval);

    u += fmt::format("# Program to improve ({})\n", parent.id);
    u += "Scores: " + score_line(parent_eval) + "\n\n";
    u += render_program_block(parent.source) + "\n\n";

    if (parent_eval.judge) {
        const auto& j = *parent_eval.judge;
        u += "# Reviewer feedback on this program\n";
        u += fmt::format("Cheating {}, faithfulness {}, simplicity {}.\n", dec(j.cheating), dec(j.faithfulness),
                         dec(j.simplicity));
        if (!j.reasoning.empty()) u += "Reasoning: " + j.reasoning + "\n";
        if (!j.suggestions.empty()) u += "Suggestions: " + j.suggestions + "\n";
        u += "\n";
    }

    if (!inspirations.empty()) {
        u += "# Other programs from the population\n";
        u += "These scored well or take a different approach. Borrow ideas, not code verbatim.\n\n";
        for (const auto& [program, eval] : inspirations) {
            u += fmt::format("## {}\n", program.id);
            u += "Scores: " + score_line(eval) + "\n\n";
            u += render_program_block(program.source) + "\n\n";
        }
    }

    u += "# Task\n";
    u += "Rewrite the program to raise its scores while keeping the construction simple and structural. "
         "Explain your idea briefly, then give the complete new program in a single ```python code block.\n";
    return {kEvolutionSystem, u};
}

ChatRequest build_judge_prompt(const ProblemSpec& problem, const CandidateProgram& candidate,
                               const EmpiricalScores& empirical, const std::vector<CheatFlag>& flags) {
    std::string u;
    u += "# Problem the program should solve\n" + problem.statement + "\n\n";
    u += "# Program\n" + render_program_block(candidate.source) + "\n\n";
    u += "# Docstring\n" + candidate.docstring + "\n\n";
    u += fmt::format(
        "# Empirical results\nsurjectivity {}, injectivity {}, validity {}, combined {}, defined on {} of inputs.\n\n",
        dec(empirical.surjectivity), dec(empirical.injectivity), dec(empirical.validity), dec(empirical.combined),
        dec(empirical.defined_fraction));

    if (!flags.empty()) {
        u += "# Automated scan\nA token scan flagged these lines. They are hints, not verdicts.\n";
        for (const auto& f : flags) u += fmt::format("- line {}: {} (`{}`)\n", f.line, to_string(f.kind), f.evidence);
        u += "\n";
    }

    u += "# Checks\n";
    u += "1. Cheating. Score 0.0 if the program lists every object of the input or output set and pairs them "
         "by position in those lists, hard-codes a lookup table, or searches for an output with matching "
         "properties (for example a breadth-first search over paths) instead of building it from the input. "
         "Otherwise score 1.0.\n";
    u += "2. Faithfulness. Score from 0.0 to 1.0 how closely the code carries out the algorithm stated in the "
         "docstring. Either argue that they agree or give an input on which they differ.\n";
    u += "3. Simplicity. Score from 0.0 to 1.0. Score high when the steps make the correspondence between the "
         "two families evident; score low for tangled code, arbitrary choices, or long chains of special "
         "cases.\n\n";
    u += "Give your reasoning and concrete suggestions for improvement, then end with exactly one block of the form\n"
         "```json\n"
         "{\"cheating\": 1.0, \"faithfulness\": 0.0, \"simplicity\": 0.0, \"reasoning\": \"...\", "
         "\"suggestions\": \"...\"}\n"
         "```\n";
    return {kJudgeSystem, u};
}

}  // namespace catbij
