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

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "catbij/program.hpp"
#include "catbij/scoring.hpp"

namespace catbij {

/// One axis of the feature grid. `edges` are interior cut points: a value v
/// lands in the number of edges <= v, so there are edges.size() + 1 bins.
struct FeatureDimension {
    std::string name;
    std::string extractor;  // see feature_value()
    std::vector<double> edges;

    int bins() const { return static_cast<int>(edges.size()) + 1; }
};

struct FeatureDescriptor {
    std::vector<FeatureDimension> dimensions;

    /// Source length in characters (8 bins) and empirical combined score (10 bins).
    static FeatureDescriptor standard();
    /// Throws std::invalid_argument on unknown extractors or unsorted edges.
    void validate() const;
};

/// Extractors: source_length, line_count, combined, final, surjectivity,
/// injectivity, validity, defined_fraction.
double feature_value(const std::string& extractor, const CandidateProgram& candidate, const Evaluation& eval);

int bin_index(double value, const std::vector<double>& edges);

using Coordinates = std::vector<int>;

Coordinates compute_features(const CandidateProgram& candidate, const Evaluation& eval,
                             const FeatureDescriptor& descriptor);

enum class InsertOutcome { new_cell, replaced, rejected };

std::string_view to_string(InsertOutcome o);
InsertOutcome parse_insert_outcome(std::string_view s);

struct Elite {
    CandidateProgram program;
    Evaluation evaluation;

    const Rational& score() const { return evaluation.final_score; }
};

struct HistoryEntry {
    std::string candidate_id;
    Coordinates coordinates;
    Rational score;
    InsertOutcome outcome = InsertOutcome::rejected;
    std::optional<std::string> displaced_id;

    friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

class EmptyArchiveError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ArchiveRestoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// MAP-Elites grid for one island: at most one elite per cell, replaced only
/// by a strictly higher final score.
class Archive {
public:
    static constexpr int kSnapshotVersion = 1;

    Archive(int island, FeatureDescriptor descriptor);

    InsertOutcome insert(const CandidateProgram& candidate, const Evaluation& eval);

    /// Uniform over occupied cells. Throws EmptyArchiveError.
    const Elite& sample_parent(std::mt19937_64& rng) const;

    /// Top ceil(k/2) by final score (ties by id), then uniform picks from the
    /// rest; never includes exclude_id.
    std::vector<const Elite*> sample_inspirations(int k, const std::string& exclude_id, std::mt19937_64& rng) const;

    /// Highest final score, ties to the smallest id. nullptr when empty.
    const Elite* best() const;
    const Elite* find(const std::string& id) const;

    int island() const { return island_; }
    const FeatureDescriptor& descriptor() const { return descriptor_; }
    const std::map<Coordinates, Elite>& cells() const { return cells_; }
    const std::vector<HistoryEntry>& history() const { return history_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    nlohmann::json to_json() const;
    /// Throws ArchiveRestoreError on malformed or mismatched input.
    static Archive from_json(const nlohmann::json& j);

    void snapshot(const std::string& path) const;
    static Archive restore(const std::string& path);

private:
    int island_;
    FeatureDescriptor descriptor_;
    std::map<Coordinates, Elite> cells_;
    std::vector<HistoryEntry> history_;
};

nlohmann::json descriptor_to_json(const FeatureDescriptor& d);
FeatureDescriptor descriptor_from_json(const nlohmann::json& j);

}  // namespace catbij
