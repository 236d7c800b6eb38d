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
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "catbij/llm.hpp"
#include "catbij/problem.hpp"
#include "catbij/scoring.hpp"

namespace catbij {

class LogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A seed or evaluated candidate as recorded in a run log.
struct LoggedCandidate {
    std::string id;
    std::string kind;  // seed | iteration
    int island = 0;
    int iteration = 0;
    std::string source;
    std::string docstring;
    Evaluation evaluation;
};

/// One iteration's outcome, evaluated or not.
struct LoggedIteration {
    int iteration = 0;
    int island = 0;
    int island_iteration = 0;
    std::string status;
    std::optional<std::string> candidate_id;
};

struct RunLog {
    std::string problem;
    int n_train = 0;
    std::vector<LoggedCandidate> candidates;  // log order
    std::vector<LoggedIteration> iterations;  // log order
};

/// Reads run.jsonl. Throws LogError on unreadable files, malformed lines or
/// an unknown schema.
RunLog load_run_log(const std::string& path);
RunLog parse_run_log(std::istream& in);

/// SHA-256 (hex) of the ordered (input, status, output) triples.
std::string functional_fingerprint(const std::vector<std::string>& inputs, const std::vector<OutputRecord>& records);

struct FunctionalGroup {
    std::string fingerprint;
    std::vector<std::string> members;
    EmpiricalScores empirical;
};

struct FunctionalGroups {
    int n = 0;
    std::vector<FunctionalGroup> groups;  // ordered by first appearance
    std::size_t distinct_score_tuples = 0;
};

/// Partitions the evaluated candidates at the run's training size by
/// fingerprint.
FunctionalGroups functional_groups(const RunLog& log, const ProblemSpec& problem);
nlohmann::json groups_to_json(const FunctionalGroups& g);

class EmbeddingError : public std::runtime_error {
public:
    EmbeddingError(const std::string& what, std::vector<std::string> ids)
        : std::runtime_error(what), ids_(std::move(ids)) {}
    const std::vector<std::string>& unembedded_ids() const { return ids_; }

private:
    std::vector<std::string> ids_;
};

class Embedder {
public:
    virtual ~Embedder() = default;
    /// One vector per text, all of the same dimension. Throws on failure.
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
    virtual std::string provider() const = 0;
};

/// Offline embedder: FNV-1a hashed character trigram counts, L2-normalized.
class TrigramEmbedder : public Embedder {
public:
    explicit TrigramEmbedder(std::size_t dim = 512) : dim_(dim) {}
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
    std::string provider() const override { return "trigram-" + std::to_string(dim_); }

private:
    std::size_t dim_;
};

/// OpenAI-compatible /embeddings client, batched, with the chat retry policy.
class HttpEmbedder : public Embedder {
public:
    HttpEmbedder(std::string endpoint, std::string model, std::string api_key_env, RetryPolicy policy = {},
                 std::size_t batch = 64);
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
    std::string provider() const override { return model_; }
    void set_sleeper(std::function<void(std::chrono::milliseconds)> s) { sleeper_ = std::move(s); }

private:
    std::string endpoint_;
    std::string model_;
    std::string api_key_env_;
    RetryPolicy policy_;
    std::size_t batch_;
    std::function<void(std::chrono::milliseconds)> sleeper_;
};

struct EmbeddingVector {
    std::string source_id;
    std::string provider;
    std::vector<double> values;
};

/// Throws EmbeddingError naming every candidate left without a vector.
std::vector<EmbeddingVector> embed_programs(const std::vector<LoggedCandidate>& candidates, Embedder& embedder);

using Matrix = std::vector<std::vector<double>>;  // row-major, one row per point

/// Sample covariance (divides by rows - 1) of mean-centered rows.
Matrix covariance_serial(const Matrix& rows);
/// Same result, columns split across OpenMP threads.
Matrix covariance_parallel(const Matrix& rows);

struct PcaResult {
    Matrix components;                   // out_dims unit vectors
    std::vector<double> eigenvalues;     // descending
    std::vector<double> explained_ratio;  // eigenvalue / total variance
    Matrix coordinates;                  // one row per input point
};

/// Power iteration with deflation on the covariance. The largest-magnitude
/// entry of each component is made positive. Identical inputs give zero
/// coordinates and zero variance. Throws std::invalid_argument on fewer than
/// two points, ragged rows or out_dims above the dimension.
PcaResult pca_project(const Matrix& rows, std::size_t out_dims);

struct MetricPoint {
    double surjectivity = 0, injectivity = 0, validity = 0, combined = 0, final_score = 0;
};

struct ProgressionRow {
    int iteration = 0;
    int island = 0;
    int island_iteration = 0;
    std::string status;
    std::optional<MetricPoint> raw;  // present when the iteration evaluated a candidate
    MetricPoint best;                // metrics of the best-final program so far on the island
    std::string best_id;
};

/// Per-iteration rows in log order; seeds initialise each island's best.
std::vector<ProgressionRow> metric_progression(const RunLog& log);

std::string progression_csv(const std::vector<ProgressionRow>& rows);

}  // namespace catbij
