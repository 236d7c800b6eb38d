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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace catbij {

enum class RecordStatus { ok, abstain, error, timeout };

std::string_view to_string(RecordStatus s);
RecordStatus parse_record_status(std::string_view s);

/// Outcome of running a candidate on one input. `output` is present iff
/// status is ok.
struct OutputRecord {
    int input_index = 0;
    RecordStatus status = RecordStatus::error;
    std::optional<std::string> output;
    std::string message;

    static OutputRecord ok(int index, std::string out) { return {index, RecordStatus::ok, std::move(out), {}}; }
    static OutputRecord abstain(int index) { return {index, RecordStatus::abstain, std::nullopt, {}}; }
    static OutputRecord error(int index, std::string msg) { return {index, RecordStatus::error, std::nullopt, std::move(msg)}; }
    static OutputRecord timeout(int index) { return {index, RecordStatus::timeout, std::nullopt, "timeout"}; }

    friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

struct ExecutionLimits {
    int per_input_timeout_ms = 1000;
    int total_timeout_ms = 30000;
    int memory_limit_mb = 512;
};

struct ExecutionRequest {
    std::string source;
    std::vector<std::string> inputs;
    ExecutionLimits limits;
};

struct ExecutionReply {
    std::vector<OutputRecord> records;
    bool syntax_ok = false;
    std::string runner_version;
    std::string message;
};

/// Raised when the executor itself fails (runner crash, protocol breach).
class ExecutorFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs candidate source over canonical input texts. Implementations must
/// return one record per input, in input order, whenever syntax_ok.
class CandidateExecutor {
public:
    virtual ~CandidateExecutor() = default;
    virtual ExecutionReply execute(const ExecutionRequest& request) = 0;
};

/// Throws std::invalid_argument unless limits are positive and inputs nonempty.
void validate_request(const ExecutionRequest& request);

}  // namespace catbij
