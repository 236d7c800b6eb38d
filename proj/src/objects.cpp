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

#include "catbij/objects.hpp"

#include <algorithm>
#include <charconv>

namespace catbij {

StepSequence::StepSequence(std::vector<std::uint8_t> steps) : steps_(std::move(steps)) {
    for (auto s : steps_) {
        if (s > 1) throw InvalidObject("step symbols must be 0 or 1");
    }
}

StepSequence StepSequence::parse(std::string_view text) {
    std::vector<std::uint8_t> steps;
    steps.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') throw InvalidObject("step text may only contain '0' and '1': " + std::string(text));
        steps.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return StepSequence(std::move(steps));
}

std::size_t StepSequence::ups() const {
    return static_cast<std::size_t>(std::count(steps_.begin(), steps_.end(), std::uint8_t{1}));
}

std::string StepSequence::text() const {
    std::string out;
    out.reserve(steps_.size());
    for (auto s : steps_) out.push_back(static_cast<char>('0' + s));
    return out;
}

bool is_dyck(const StepSequence& s) {
    long height = 0;
    for (auto step : s.steps()) {
        height += step == 1 ? 1 : -1;
        if (height < 0) return false;
    }
    return height == 0;
}

bool is_oda(const StepSequence& s) {
    if (s.size() % 4 != 0) return false;
    long x = 0;
    long y = 0;
    for (auto step : s.steps()) {
        if (step == 1) ++y; else ++x;
        if (x == y && x % 2 == 1) return false;
    }
    return x == y;
}

DyckPath::DyckPath(StepSequence steps) : steps_(std::move(steps)) {
    if (!is_dyck(steps_)) throw InvalidObject("not a Dyck path: " + steps_.text());
}

LatticePath::LatticePath(StepSequence steps) : steps_(std::move(steps)) {
    if (!is_oda(steps_)) throw InvalidObject("not an odd-diagonal-avoiding path: " + steps_.text());
}

Permutation::Permutation(std::vector<int> values) : values_(std::move(values)) {
    std::vector<bool> seen(values_.size() + 1, false);
    for (int v : values_) {
        if (v < 1 || static_cast<std::size_t>(v) > values_.size() || seen[static_cast<std::size_t>(v)]) {
            throw InvalidObject("not a permutation of 1..n");
        }
        seen[static_cast<std::size_t>(v)] = true;
    }
}

Permutation Permutation::parse(std::string_view text) {
    std::vector<int> values;
    if (text.find(',') != std::string_view::npos) {
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto end = std::min(text.find(',', start), text.size());
            const auto token = text.substr(start, end - start);
            int v = 0;
            const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
                throw InvalidObject("bad permutation text: " + std::string(text));
            }
            values.push_back(v);
            start = end + 1;
        }
    } else {
        for (char c : text) {
            if (c < '1' || c > '9') throw InvalidObject("bad permutation text: " + std::string(text));
            values.push_back(c - '0');
        }
    }
    return Permutation(std::move(values));
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<int> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<int>(i + 1);
    return Permutation(std::move(values));
}

std::string Permutation::text() const {
    std::string out;
    const bool compact = values_.size() <= 9;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!compact && i > 0) out.push_back(',');
        out += std::to_string(values_[i]);
    }
    return out;
}

Pattern::Pattern(Permutation p) : perm_(std::move(p)) {
    if (perm_.size() < 3 || perm_.size() > 4) throw InvalidObject("patterns must have length 3 or 4");
}

}  // namespace catbij
