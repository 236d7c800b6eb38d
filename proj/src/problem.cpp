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

#include "catbij/problem.hpp"

#include <stdexcept>

namespace catbij {

void ProblemSpec::check_size(int n, EnumerationBound bound) const {
    if (n < 0) throw std::invalid_argument("problem size must be nonnegative");
    const int dom = domain.catalan_arg(n);
    const int cod = codomain.catalan_arg(codomain_scale * n);
    if (dom > bound.max_catalan_arg || cod > bound.max_catalan_arg) {
        throw ResourceLimit("size " + std::to_string(n) + " exceeds the enumeration bound for problem " + name);
    }
}

namespace {

std::vector<ProblemSpec> make_problems() {
    std::vector<ProblemSpec> problems;

    problems.push_back(ProblemSpec{
        .name = "oda_to_dyck",
        .domain = Family::parse("oda"),
        .codomain = Family::parse("dyck"),
        .codomain_scale = 2,
        .n_train = 2,
        .n_verify = {1, 2, 3},
        .statement =
            "Write a function that maps odd-diagonal-avoiding lattice paths to Dyck paths bijectively.\n"
            "Input: a North-East lattice path from (0,0) to (2n,2n), given as a list of 4n steps where "
            "1 = North and 0 = East. The path never visits a diagonal point (2i-1, 2i-1) for 1 <= i <= n.\n"
            "Output: a Dyck path of semilength 2n, given as a list of 4n steps (1 = up, 0 = down) whose "
            "prefix heights (#1 - #0) are never negative.\n"
            "Both sets are counted by the Catalan number C_{2n}.",
        .hints =
            "Decompose the input at its returns to the diagonal. Because odd diagonal points are avoided, "
            "every return happens at a step index divisible by 4. Paths may dip below the diagonal; think "
            "about how an excursion below the diagonal can be turned into one above it.",
        .steering =
            "Do not count or rank paths, and do not build lookup tables. The map must be a direct, local "
            "construction on the input steps.",
    });

    problems.push_back(ProblemSpec{
        .name = "dyck_to_av321",
        .domain = Family::parse("dyck"),
        .codomain = Family::parse("av321"),
        .codomain_scale = 1,
        .n_train = 4,
        .n_verify = {3, 4, 5, 6, 7},
        .statement =
            "Write a function that maps Dyck paths of semilength n bijectively to 321-avoiding permutations "
            "of {1, ..., n}.\n"
            "Input: a Dyck path given as a list of 2n steps (1 = up/North, 0 = down/East) whose prefix "
            "heights are never negative.\n"
            "Output: a permutation in one-line notation, a list containing each of 1..n exactly once.\n"
            "A permutation avoids 321 when it has no indices i < j < k with p[i] > p[j] > p[k], that is, "
            "it contains no decreasing subsequence of length three.",
        .hints =
            "A 321-avoiding permutation is determined by its excedances: the positions i with p(i) > i and "
            "their values. Consider reading positions and values off the runs of up and down steps.",
        .steering =
            "Stack-sorting constructions produce 231-, 132-, 213- or 312-avoiding permutations, not "
            "321-avoiding ones. Do not reuse them.",
    });

    problems.push_back(ProblemSpec{
        .name = "area_bounce",
        .domain = Family::parse("dyck"),
        .codomain = Family::parse("dyck"),
        .codomain_scale = 1,
        .n_train = 4,
        .n_verify = {3, 4, 5, 6},
        .statement =
            "Write a function that maps Dyck paths of semilength n to Dyck paths of semilength n bijectively "
            "while exchanging the area and bounce statistics: area(f(D)) = bounce(D) and bounce(f(D)) = area(D).\n"
            "Paths are lists of 2n steps (1 = North, 0 = East) whose prefix heights are never negative. "
            "Area counts the full cells between the path and the diagonal; bounce is computed from the "
            "standard bounce path. Return None for inputs where the construction does not apply.",
        .hints =
            "The seed program is a valid bijection that exchanges area and bounce on a subset of paths. "
            "Analyze the inputs where it returns None and propose a targeted modification that extends it.",
        .steering =
            "The zeta map sends (area, dinv) to (bounce, area); it does not solve this problem. Do not "
            "redefine the bounce statistic. Do not search for an output path with matching statistics.",
    });

    return problems;
}

}  // namespace

const std::vector<ProblemSpec>& builtin_problems() {
    static const std::vector<ProblemSpec> problems = make_problems();
    return problems;
}

const ProblemSpec& find_problem(std::string_view name) {
    for (const auto& p : builtin_problems()) {
        if (p.name == name) return p;
    }
    throw std::invalid_argument("unknown problem: " + std::string(name));
}

}  // namespace catbij
