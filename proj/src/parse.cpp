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

#include "catbij/parse.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>

#include <fmt/format.h>

namespace catbij {

namespace {

using json = nlohmann::json;

struct Fence {
    std::string info;
    std::string content;
};

bool is_fence_line(std::string_view line) {
    const auto first = line.find_first_not_of(' ');
    return first != std::string_view::npos && first <= 3 && line.substr(first).starts_with("```");
}

std::vector<Fence> fenced_blocks(std::string_view text) {
    std::vector<Fence> blocks;
    std::optional<Fence> open;
    std::size_t content_start = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        if (is_fence_line(line)) {
            if (!open) {
                Fence f;
                auto info = line.substr(line.find("```") + 3);
                while (!info.empty() && (info.back() == ' ' || info.back() == '\r')) info.remove_suffix(1);
                f.info = std::string(info);
                open = std::move(f);
                content_start = std::min(end + 1, text.size());
            } else {
                std::string content(text.substr(content_start, pos > content_start ? pos - content_start : 0));
                if (!content.empty() && content.back() == '\n') content.pop_back();
                open->content = std::move(content);
                blocks.push_back(std::move(*open));
                open.reset();
            }
        }
        if (end == text.size()) break;
        pos = end + 1;
    }
    return blocks;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Strips the indentation shared by all nonblank lines after the first.
std::string dedent(const std::string& s) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (true) {
        const auto end = s.find('\n', pos);
        lines.push_back(s.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    std::size_t common = std::string::npos;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto first = lines[i].find_first_not_of(' ');
        if (first == std::string::npos) continue;
        common = std::min(common, first);
    }
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) out += '\n';
        if (i > 0 && common != std::string::npos && lines[i].size() >= common) out += lines[i].substr(common);
        else out += lines[i];
    }
    return out;
}

std::string first_docstring(const std::string& source) {
    const auto dq = source.find("\"\"\"");
    const auto sq = source.find("'''");
    const auto open = std::min(dq, sq);
    if (open == std::string::npos) return {};
    const std::string quote = source.substr(open, 3);
    const auto close = source.find(quote, open + 3);
    if (close == std::string::npos) return {};
    return trim(dedent(source.substr(open + 3, close - open - 3)));
}

Rational read_score(const json& obj, const char* key, std::vector<std::string>& warnings) {
    if (!obj.contains(key)) throw ResponseParseError(ResponseError::bad_score, fmt::format("score block lacks '{}'", key));
    const auto& v = obj[key];
    double x = 0;
    if (v.is_number()) {
        x = v.get<double>();
    } else if (v.is_string()) {
        try {
            x = std::stod(v.get<std::string>());
        } catch (const std::exception&) {
            throw ResponseParseError(ResponseError::bad_score, fmt::format("score '{}' is not numeric", key));
        }
    } else {
        throw ResponseParseError(ResponseError::bad_score, fmt::format("score '{}' is not numeric", key));
    }
    if (!std::isfinite(x)) throw ResponseParseError(ResponseError::bad_score, fmt::format("score '{}' is not finite", key));
    if (x < 0.0 || x > 1.0) {
        const double clamped = std::clamp(x, 0.0, 1.0);
        warnings.push_back(fmt::format("{} = {} clamped to {}", key, x, clamped));
        x = clamped;
    }
    return Rational::from_double(x);
}

std::string text_field(const json& obj, const char* key) {
    if (!obj.contains(key)) return {};
    const auto& v = obj[key];
    return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

ProgramText parse_program_response(std::string_view text) {
    const auto blocks = fenced_blocks(text);
    if (blocks.empty()) throw ResponseParseError(ResponseError::no_code_block, "response contains no fenced code block");
    ProgramText out;
    out.source = blocks.back().content;
    if (trim(out.source).empty()) throw ResponseParseError(ResponseError::no_code_block, "last code block is empty");
    out.docstring = first_docstring(out.source);
    if (out.docstring.empty()) throw ResponseParseError(ResponseError::empty_docstring, "program has no docstring");
    return out;
}

std::string extract_docstring(const std::string& source) { return first_docstring(source); }

JudgeParse parse_judge_response(std::string_view text) {
    const auto blocks = fenced_blocks(text);
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        json obj;
        try {
            obj = json::parse(it->content);
        } catch (const json::exception&) {
            continue;
        }
        if (!obj.is_object() || !obj.contains("cheating")) continue;

        JudgeParse out;
        out.scores.cheating = read_score(obj, "cheating", out.warnings);
        out.scores.faithfulness = read_score(obj, "faithfulness", out.warnings);
        out.scores.simplicity = read_score(obj, "simplicity", out.warnings);
        out.scores.reasoning = text_field(obj, "reasoning");
        out.scores.suggestions = text_field(obj, "suggestions");
        if (out.scores.reasoning.empty()) {
            // Fall back to the prose before the block.
            const auto fence = text.rfind("```json");
            out.scores.reasoning = trim(text.substr(0, fence == std::string_view::npos ? 0 : fence));
        }
        return out;
    }
    throw ResponseParseError(ResponseError::no_score_block, "response contains no JSON score block");
}

JudgeScores median_judge(const std::vector<JudgeScores>& samples) {
    if (samples.empty()) throw std::invalid_argument("no judge samples to aggregate");
    auto median = [&](Rational JudgeScores::*field) {
        std::vector<Rational> v;
        for (const auto& s : samples) v.push_back(s.*field);
        std::sort(v.begin(), v.end());
        return v[(v.size() - 1) / 2];
    };
    JudgeScores out = samples.front();
    out.cheating = median(&JudgeScores::cheating);
    out.faithfulness = median(&JudgeScores::faithfulness);
    out.simplicity = median(&JudgeScores::simplicity);
    return out;
}

}  // namespace catbij
