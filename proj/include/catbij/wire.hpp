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

#include <iosfwd>
#include <string>
#include <string_view>

#include "catbij/executor.hpp"

namespace catbij::wire {

/// Newline-delimited JSON between the orchestrator and a runner process.
/// Request: {"source", "inputs", "limits"}. Reply: a header
/// {"syntax_ok", "runner_version", "message"?} followed by one
/// {"index", "status", "output"?, "message"?} per input.
/// Unknown fields are ignored on decode.

inline constexpr std::size_t kMaxMessageBytes = std::size_t{1} << 20;

class WireError : public ExecutorFailure {
public:
    using ExecutorFailure::ExecutorFailure;
};

struct ReplyHeader {
    bool syntax_ok = false;
    std::string runner_version;
    std::string message;
};

/// Each encoder returns one line including the trailing '\n' and throws
/// WireError if it would exceed kMaxMessageBytes.
std::string encode_request(const ExecutionRequest& request);
std::string encode_header(const ReplyHeader& header);
std::string encode_record(const OutputRecord& record);

/// Decoders throw WireError on malformed input.
ExecutionRequest decode_request(std::string_view line);
ReplyHeader decode_header(std::string_view line);
OutputRecord decode_record(std::string_view line);

/// Runner side: reads one request from `in`, executes it and writes the reply
/// to `out`. Returns the process exit code (0 on a complete reply).
int serve(std::istream& in, std::ostream& out, CandidateExecutor& executor);

}  // namespace catbij::wire
