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

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "catbij/objects.hpp"

namespace catbij {

/// Raised by first_return when no prefix height returns to zero.
class NoReturnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Upper bound on the Catalan argument of any enumeration. ODA(n) has
/// argument 2n, the other families n.
struct EnumerationBound {
    int max_catalan_arg = 16;
};

/// Exact Catalan number. Throws OverflowError once C_n leaves uint64.
std::uint64_t catalan(int n);

// Enumerations are lexicographic on canonical text with 0 < 1 (paths) or
// on one-line notation (permutations).
std::vector<DyckPath> enumerate_dyck_paths(int n, EnumerationBound bound = {});
std::vector<LatticePath> enumerate_oda_paths(int n, EnumerationBound bound = {});
std::vector<Permutation> enumerate_avoiding_permutations(int n, const Pattern& pattern, EnumerationBound bound = {});

bool avoids_pattern(const Permutation& p, const Pattern& pattern);

// q,t-Catalan statistics. The area word a_i is the height before the i-th
// up step.
std::vector<int> area_word(const DyckPath& d);
int area(const DyckPath& d);
int bounce(const DyckPath& d);
int dinv(const DyckPath& d);

/// Haglund's zeta map: bounce(zeta(d)) == area(d), area(zeta(d)) == dinv(d).
DyckPath zeta(const DyckPath& d);

/// Partial sums of maximal runs of 1s (ascent) / 0s (descent), final sum dropped.
std::vector<int> ascent_code(const DyckPath& d);
std::vector<int> descent_code(const DyckPath& d);

/// Billey-Jockusch-Stanley map onto 321-avoiding permutations: the descent
/// code gives the excedance positions, ascent code + 1 the excedance values,
/// and the remaining values fill the remaining positions in increasing order.
Permutation bjs_bijection(const DyckPath& d);

/// Smallest t > 0 with prefix height zero. Throws NoReturnError otherwise.
std::size_t first_return(const StepSequence& s);

StepSequence complement(const StepSequence& s);

/// First-return decomposition P = U V. An above-diagonal excursion U = 1 X 0
/// maps to 1 X 0 phi(V); a below-diagonal one U = 0 Y 1 maps to
/// 1 phi(V) 0 comp(Y).
DyckPath oda_to_dyck(const LatticePath& p);

/// Same recursion over a raw step sequence; validates nothing beyond the
/// first-return search.
StepSequence oda_to_dyck_steps(const StepSequence& s);

/// A named object family. Every family enumerates to canonical texts.
struct Family {
    enum class Kind { dyck, oda, avoiding };
    Kind kind = Kind::dyck;
    std::string pattern;  // only for avoiding, e.g. "321"

    /// "dyck", "oda", "av321", "av3142", ...
    static Family parse(std::string_view name);
    std::string name() const;

    /// Catalan argument of the family at parameter n (2n for ODA).
    int catalan_arg(int n) const { return kind == Kind::oda ? 2 * n : n; }

    std::vector<std::string> enumerate(int n, EnumerationBound bound = {}) const;

    /// True iff `text` is the canonical text of a member at parameter n.
    bool contains(std::string_view text, int n) const;
};

}  // namespace catbij
