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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "catbij/scoring.hpp"

namespace catbij {

enum class ResponseError { no_code_block, empty_docstring, no_score_block, bad_score };

class ResponseParseError : public std::runtime_error {
public:
    ResponseParseError(ResponseError kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ResponseError kind() const { return kind_; }

private:
    ResponseError kind_;
};

struct ProgramText {
    std::string source;
    std::string docstring;
};

/// Takes the last fenced code block as the program and its first
/// triple-quoted string as the docstring.
ProgramText parse_program_response(std::string_view text);

/// First triple-quoted string of a source, dedented and trimmed; "" if none.
std::string extract_docstring(const std::string& source);

struct JudgeParse {
    JudgeScores scores;
    std::vector<std::string> warnings;  // e.g. clamped values
};

/// Reads the last fenced block that holds a JSON object with the keys
/// cheating, faithfulness, simplicity; optional reasoning and suggestions.
/// Out-of-range numbers are clamped into [0, 1] with a warning.
JudgeParse parse_judge_response(std::string_view text);

/// Field-wise median of several judge samples (lower median for even
/// counts); text fields come from the first sample.
JudgeScores median_judge(const std::vector<JudgeScores>& samples);

}  // namespace catbij
