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
#include <string_view>
#include <vector>

#include "catbij/combinatorics.hpp"

namespace catbij {

/// A named bijection problem: a domain family at n, a codomain family at
/// codomain_scale * n, evaluation sizes, and prompt text.
struct ProblemSpec {
    std::string name;
    Family domain;
    Family codomain;
    int codomain_scale = 1;
    int n_train = 1;
    std::vector<int> n_verify;
    std::string statement;
    std::string hints;
    std::string steering;

    std::vector<std::string> domain_at(int n, EnumerationBound bound = {}) const { return domain.enumerate(n, bound); }
    std::vector<std::string> codomain_at(int n, EnumerationBound bound = {}) const {
        return codomain.enumerate(codomain_scale * n, bound);
    }

    /// Throws ResourceLimit if n exceeds the bound for either side.
    void check_size(int n, EnumerationBound bound = {}) const;
};

/// The three built-in problems: "oda_to_dyck", "dyck_to_av321", "area_bounce".
const std::vector<ProblemSpec>& builtin_problems();

/// Throws std::invalid_argument for unknown names.
const ProblemSpec& find_problem(std::string_view name);

}  // namespace catbij
