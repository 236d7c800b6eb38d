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
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace catbij {

/// Raised when text or a vector does not describe a valid object.
class InvalidObject : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an enumeration request exceeds the configured bound.
class ResourceLimit : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Internal consistency failure; indicates a bug rather than bad input.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Finite word over {0, 1}. 1 is a North (up) step, 0 an East (down) step.
class StepSequence {
public:
    StepSequence() = default;
    explicit StepSequence(std::vector<std::uint8_t> steps);

    /// Parses canonical text such as "110100".
    static StepSequence parse(std::string_view text);

    std::span<const std::uint8_t> steps() const { return steps_; }
    std::size_t size() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }
    std::uint8_t operator[](std::size_t i) const { return steps_[i]; }

    std::size_t ups() const;

    /// Canonical text: digits concatenated.
    std::string text() const;

    friend auto operator<=>(const StepSequence&, const StepSequence&) = default;

private:
    std::vector<std::uint8_t> steps_;
};

/// Balanced step sequence whose prefix heights (#1 - #0) never go negative.
class DyckPath {
public:
    DyckPath() = default;
    /// Throws InvalidObject unless `steps` is a Dyck word.
    explicit DyckPath(StepSequence steps);

    static DyckPath parse(std::string_view text) { return DyckPath(StepSequence::parse(text)); }

    const StepSequence& steps() const { return steps_; }
    std::size_t semilength() const { return steps_.size() / 2; }
    std::string text() const { return steps_.text(); }

    friend auto operator<=>(const DyckPath&, const DyckPath&) = default;

private:
    StepSequence steps_;
};

/// NE lattice path from (0,0) to (2n,2n) that never visits (2i-1, 2i-1).
/// The semilength parameter n is a quarter of the step count.
class LatticePath {
public:
    LatticePath() = default;
    explicit LatticePath(StepSequence steps);

    static LatticePath parse(std::string_view text) { return LatticePath(StepSequence::parse(text)); }

    const StepSequence& steps() const { return steps_; }
    std::size_t semilength() const { return steps_.size() / 4; }
    std::string text() const { return steps_.text(); }

    friend auto operator<=>(const LatticePath&, const LatticePath&) = default;

private:
    StepSequence steps_;
};

/// One-line notation of a permutation of 1..n.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> values);

    /// Accepts "2314" (one digit per value) or "10,2,1,..." (comma separated).
    static Permutation parse(std::string_view text);
    static Permutation identity(std::size_t n);

    std::span<const int> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    int operator[](std::size_t i) const { return values_[i]; }

    /// Digits concatenated when every value is a single digit (n <= 9),
    /// comma separated otherwise.
    std::string text() const;

    friend auto operator<=>(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> values_;
};

/// A short permutation (length 3 or 4) used as an avoidance pattern.
class Pattern {
public:
    explicit Pattern(Permutation p);
    static Pattern parse(std::string_view text) { return Pattern(Permutation::parse(text)); }

    const Permutation& permutation() const { return perm_; }
    std::size_t size() const { return perm_.size(); }
    std::string text() const { return perm_.text(); }

private:
    Permutation perm_;
};

bool is_dyck(const StepSequence& s);
bool is_oda(const StepSequence& s);

}  // namespace catbij
