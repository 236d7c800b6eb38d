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

#include "catbij/executor.hpp"

namespace catbij {

std::string_view to_string(RecordStatus s) {
    switch (s) {
        case RecordStatus::ok: return "ok";
        case RecordStatus::abstain: return "abstain";
        case RecordStatus::error: return "error";
        case RecordStatus::timeout: return "timeout";
    }
    return "error";
}

RecordStatus parse_record_status(std::string_view s) {
    if (s == "ok") return RecordStatus::ok;
    if (s == "abstain") return RecordStatus::abstain;
    if (s == "error") return RecordStatus::error;
    if (s == "timeout") return RecordStatus::timeout;
    throw std::invalid_argument("unknown record status: " + std::string(s));
}

void validate_request(const ExecutionRequest& request) {
    if (request.inputs.empty()) throw std::invalid_argument("execution request has no inputs");
    const auto& l = request.limits;
    if (l.per_input_timeout_ms <= 0 || l.total_timeout_ms <= 0 || l.memory_limit_mb <= 0) {
        throw std::invalid_argument("execution limits must be positive");
    }
}

}  // namespace catbij
