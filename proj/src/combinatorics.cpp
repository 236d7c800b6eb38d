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

#include "catbij/combinatorics.hpp"

#include <algorithm>
#include <numeric>

#include "catbij/rational.hpp"

namespace catbij {

namespace {

void check_bound(int catalan_arg, EnumerationBound bound, std::string_view what) {
    if (catalan_arg > bound.max_catalan_arg) {
        throw ResourceLimit(std::string(what) + ": Catalan argument " + std::to_string(catalan_arg) +
                            " exceeds the configured bound " + std::to_string(bound.max_catalan_arg));
    }
}

void require_nonnegative(int n, std::string_view what) {
    if (n < 0) throw std::invalid_argument(std::string(what) + ": n must be nonnegative");
}

// Does the last element of `prefix` complete an occurrence of `pattern`?
bool ends_with_occurrence(const std::vector<int>& prefix, std::span<const int> pattern) {
    const std::size_t k = pattern.size();
    const std::size_t m = prefix.size();
    if (m < k) return false;
    std::vector<std::size_t> idx(k);
    idx[k - 1] = m - 1;
    // Enumerate increasing index tuples idx[0..k-2] over [0, m-1).
    for (std::size_t i = 0; i + 1 < k; ++i) idx[i] = i;
    while (true) {
        bool iso = true;
        for (std::size_t a = 0; a < k && iso; ++a) {
            for (std::size_t b = a + 1; b < k; ++b) {
                if ((prefix[idx[a]] < prefix[idx[b]]) != (pattern[a] < pattern[b])) {
                    iso = false;
                    break;
                }
            }
        }
        if (iso) return true;
        // Advance the combination.
        std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(k) - 2;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - 1 - (k - 1 - static_cast<std::size_t>(pos))) --pos;
        if (pos < 0) return false;
        ++idx[static_cast<std::size_t>(pos)];
        for (auto j = static_cast<std::size_t>(pos) + 1; j + 1 < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

void extend_dyck(std::vector<std::uint8_t>& word, int n, int ups, int downs, std::vector<DyckPath>& out) {
    if (static_cast<int>(word.size()) == 2 * n) {
        out.emplace_back(StepSequence(word));
        return;
    }
    if (downs < ups) {
        word.push_back(0);
        extend_dyck(word, n, ups, downs + 1, out);
        word.pop_back();
    }
    if (ups < n) {
        word.push_back(1);
        extend_dyck(word, n, ups + 1, downs, out);
        word.pop_back();
    }
}

void extend_oda(std::vector<std::uint8_t>& word, int side, int x, int y, std::vector<LatticePath>& out) {
    if (x == side && y == side) {
        out.emplace_back(StepSequence(word));
        return;
    }
    // East (0) before North (1) keeps the output lexicographic.
    if (x < side && !(x + 1 == y && y % 2 == 1)) {
        word.push_back(0);
        extend_oda(word, side, x + 1, y, out);
        word.pop_back();
    }
    if (y < side && !(x == y + 1 && x % 2 == 1)) {
        word.push_back(1);
        extend_oda(word, side, x, y + 1, out);
        word.pop_back();
    }
}

void extend_avoiding(std::vector<int>& prefix, std::vector<bool>& used, int n, std::span<const int> pattern,
                     std::vector<Permutation>& out) {
    if (static_cast<int>(prefix.size()) == n) {
        out.emplace_back(prefix);
        return;
    }
    for (int v = 1; v <= n; ++v) {
        if (used[static_cast<std::size_t>(v)]) continue;
        prefix.push_back(v);
        if (!ends_with_occurrence(prefix, pattern)) {
            used[static_cast<std::size_t>(v)] = true;
            extend_avoiding(prefix, used, n, pattern, out);
            used[static_cast<std::size_t>(v)] = false;
        }
        prefix.pop_back();
    }
}

std::vector<int> run_partial_sums(const DyckPath& d, std::uint8_t symbol) {
    std::vector<int> sums;
    int total = 0;
    int run = 0;
    for (auto s : d.steps().steps()) {
        if (s == symbol) {
            ++run;
        } else if (run > 0) {
            total += run;
            sums.push_back(total);
            run = 0;
        }
    }
    if (run > 0) sums.push_back(total + run);
    if (!sums.empty()) sums.pop_back();
    return sums;
}

}  // namespace

std::uint64_t catalan(int n) {
    require_nonnegative(n, "catalan");
    // C_{k+1} = C_k * 2(2k+1) / (k+2), exact at every step.
    unsigned __int128 c = 1;
    for (int k = 0; k < n; ++k) {
        c = c * static_cast<unsigned>(2 * (2 * k + 1));
        c /= static_cast<unsigned>(k + 2);
        if (c > std::numeric_limits<std::uint64_t>::max()) {
            throw OverflowError("catalan(" + std::to_string(n) + ") does not fit in 64 bits");
        }
    }
    return static_cast<std::uint64_t>(c);
}

std::vector<DyckPath> enumerate_dyck_paths(int n, EnumerationBound bound) {
    require_nonnegative(n, "enumerate_dyck_paths");
    check_bound(n, bound, "enumerate_dyck_paths");
    std::vector<DyckPath> out;
    out.reserve(catalan(n));
    std::vector<std::uint8_t> word;
    word.reserve(static_cast<std::size_t>(2 * n));
    extend_dyck(word, n, 0, 0, out);
    return out;
}

std::vector<LatticePath> enumerate_oda_paths(int n, EnumerationBound bound) {
    require_nonnegative(n, "enumerate_oda_paths");
    check_bound(2 * n, bound, "enumerate_oda_paths");
    std::vector<LatticePath> out;
    out.reserve(catalan(2 * n));
    std::vector<std::uint8_t> word;
    word.reserve(static_cast<std::size_t>(4 * n));
    extend_oda(word, 2 * n, 0, 0, out);
    return out;
}

std::vector<Permutation> enumerate_avoiding_permutations(int n, const Pattern& pattern, EnumerationBound bound) {
    require_nonnegative(n, "enumerate_avoiding_permutations");
    check_bound(n, bound, "enumerate_avoiding_permutations");
    std::vector<Permutation> out;
    std::vector<int> prefix;
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    extend_avoiding(prefix, used, n, pattern.permutation().values(), out);
    return out;
}

bool avoids_pattern(const Permutation& p, const Pattern& pattern) {
    std::vector<int> prefix;
    prefix.reserve(p.size());
    for (int v : p.values()) {
        prefix.push_back(v);
        if (ends_with_occurrence(prefix, pattern.permutation().values())) return false;
    }
    return true;
}

std::vector<int> area_word(const DyckPath& d) {
    std::vector<int> word;
    word.reserve(d.semilength());
    int height = 0;
    for (auto s : d.steps().steps()) {
        if (s == 1) {
            word.push_back(height);
            ++height;
        } else {
            --height;
        }
    }
    return word;
}

int area(const DyckPath& d) {
    const auto word = area_word(d);
    return std::accumulate(word.begin(), word.end(), 0);
}

int bounce(const DyckPath& d) {
    // x-coordinate of each North step: the number of East steps before it.
    std::vector<int> up_x;
    int east = 0;
    for (auto s : d.steps().steps()) {
        if (s == 1) up_x.push_back(east); else ++east;
    }
    // Walk West from (n,n) to the North step ending on the current row, then
    // South to the diagonal; sum the touch points.
    int total = 0;
    auto row = static_cast<int>(d.semilength());
    while (row > 0) {
        const int touch = up_x[static_cast<std::size_t>(row - 1)];
        if (touch >= row) throw InvariantViolation("bounce path failed to descend");
        total += touch;
        row = touch;
    }
    return total;
}

int dinv(const DyckPath& d) {
    const auto a = area_word(d);
    int count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            if (a[i] == a[j] || a[i] == a[j] + 1) ++count;
        }
    }
    return count;
}

DyckPath zeta(const DyckPath& d) {
    const auto a = area_word(d);
    if (a.empty()) return d;
    const int top = *std::max_element(a.begin(), a.end());
    std::vector<std::uint8_t> word;
    word.reserve(2 * a.size());
    // Sweep levels from the top down, reading the area word right to left.
    for (int level = top + 1; level >= 0; --level) {
        for (auto it = a.rbegin(); it != a.rend(); ++it) {
            if (*it == level - 1) word.push_back(1);
            else if (*it == level) word.push_back(0);
        }
    }
    return DyckPath(StepSequence(std::move(word)));
}

std::vector<int> ascent_code(const DyckPath& d) { return run_partial_sums(d, 1); }
std::vector<int> descent_code(const DyckPath& d) { return run_partial_sums(d, 0); }

Permutation bjs_bijection(const DyckPath& d) {
    const auto n = d.semilength();
    const auto asc = ascent_code(d);
    const auto desc = descent_code(d);
    if (asc.size() != desc.size()) throw InvariantViolation("ascent and descent codes differ in length");

    std::vector<int> values(n, 0);
    std::vector<bool> value_used(n + 1, false);
    for (std::size_t i = 0; i < desc.size(); ++i) {
        const auto pos = static_cast<std::size_t>(desc[i]);
        const int value = asc[i] + 1;
        if (pos < 1 || pos > n || value < 1 || static_cast<std::size_t>(value) > n || values[pos - 1] != 0 ||
            value_used[static_cast<std::size_t>(value)]) {
            throw InvariantViolation("excedance data out of range");
        }
        values[pos - 1] = value;
        value_used[static_cast<std::size_t>(value)] = true;
    }
    int next = 1;
    for (auto& v : values) {
        if (v != 0) continue;
        while (value_used[static_cast<std::size_t>(next)]) ++next;
        v = next;
        value_used[static_cast<std::size_t>(next)] = true;
    }
    return Permutation(std::move(values));
}

std::size_t first_return(const StepSequence& s) {
    long height = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        height += s[i] == 1 ? 1 : -1;
        if (height == 0) return i + 1;
    }
    throw NoReturnError("no return to diagonal found");
}

StepSequence complement(const StepSequence& s) {
    std::vector<std::uint8_t> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<std::uint8_t>(1 - s[i]);
    return StepSequence(std::move(out));
}

StepSequence oda_to_dyck_steps(const StepSequence& s) {
    if (s.empty()) return {};
    const std::size_t t = first_return(s);
    const auto all = s.steps();
    const auto interior = all.subspan(1, t - 2);
    const StepSequence rest_mapped = oda_to_dyck_steps(StepSequence({all.begin() + static_cast<std::ptrdiff_t>(t), all.end()}));
    const auto rest = rest_mapped.steps();

    std::vector<std::uint8_t> out;
    out.reserve(s.size());
    out.push_back(1);
    if (all[0] == 1) {
        out.insert(out.end(), interior.begin(), interior.end());
        out.push_back(0);
        out.insert(out.end(), rest.begin(), rest.end());
    } else {
        out.insert(out.end(), rest.begin(), rest.end());
        out.push_back(0);
        for (auto step : interior) out.push_back(static_cast<std::uint8_t>(1 - step));
    }
    return StepSequence(std::move(out));
}

DyckPath oda_to_dyck(const LatticePath& p) {
    return DyckPath(oda_to_dyck_steps(p.steps()));
}

Family Family::parse(std::string_view name) {
    if (name == "dyck") return {Kind::dyck, {}};
    if (name == "oda") return {Kind::oda, {}};
    if (name.starts_with("av") && name.size() > 2) {
        const std::string pat(name.substr(2));
        Pattern::parse(pat);  // validates
        return {Kind::avoiding, pat};
    }
    throw std::invalid_argument("unknown object family: " + std::string(name));
}

std::string Family::name() const {
    switch (kind) {
        case Kind::dyck: return "dyck";
        case Kind::oda: return "oda";
        case Kind::avoiding: return "av" + pattern;
    }
    return {};
}

std::vector<std::string> Family::enumerate(int n, EnumerationBound bound) const {
    std::vector<std::string> out;
    switch (kind) {
        case Kind::dyck:
            for (const auto& d : enumerate_dyck_paths(n, bound)) out.push_back(d.text());
            break;
        case Kind::oda:
            for (const auto& p : enumerate_oda_paths(n, bound)) out.push_back(p.text());
            break;
        case Kind::avoiding:
            for (const auto& p : enumerate_avoiding_permutations(n, Pattern::parse(pattern), bound)) {
                out.push_back(p.text());
            }
            break;
    }
    return out;
}

bool Family::contains(std::string_view text, int n) const {
    try {
        switch (kind) {
            case Kind::dyck: return DyckPath::parse(text).semilength() == static_cast<std::size_t>(n);
            case Kind::oda: return LatticePath::parse(text).semilength() == static_cast<std::size_t>(n);
            case Kind::avoiding: {
                const auto p = Permutation::parse(text);
                return p.size() == static_cast<std::size_t>(n) && p.text() == text &&
                       avoids_pattern(p, Pattern::parse(pattern));
            }
        }
    } catch (const InvalidObject&) {
        return false;
    }
    return false;
}

}  // namespace catbij
