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

#include "catbij/serialize.hpp"

#include <charconv>

namespace catbij {

using json = nlohmann::json;

Rational parse_rational(std::string_view text) {
    auto read = [&](std::string_view s) {
        std::int64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            throw std::invalid_argument("not a rational: " + std::string(text));
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(read(text));
    return Rational(read(text.substr(0, slash)), read(text.substr(slash + 1)));
}

void to_json(json& j, const Rational& r) { j = r.str(); }

void from_json(const json& j, Rational& r) {
    if (j.is_number_integer()) {
        r = Rational(j.get<std::int64_t>());
    } else if (j.is_number()) {
        r = Rational::from_double(j.get<double>());
    } else {
        r = parse_rational(j.get<std::string>());
    }
}

void to_json(json& j, const OutputRecord& r) {
    j = {{"index", r.input_index}, {"status", std::string(to_string(r.status))}};
    if (r.output) j["output"] = *r.output;
    if (!r.message.empty()) j["message"] = r.message;
}

void from_json(const json& j, OutputRecord& r) {
    r.input_index = j.at("index").get<int>();
    r.status = parse_record_status(j.at("status").get<std::string>());
    r.output = j.contains("output") ? std::optional(j["output"].get<std::string>()) : std::nullopt;
    r.message = j.value("message", std::string{});
}

void to_json(json& j, const CandidateProgram& p) {
    j = {{"id", p.id},         {"source", p.source},        {"docstring", p.docstring}, {"island", p.island},
         {"iteration", p.iteration}, {"model_name", p.model_name}};
    j["parent_id"] = p.parent_id ? json(*p.parent_id) : json(nullptr);
}

void from_json(const json& j, CandidateProgram& p) {
    p.id = j.at("id").get<std::string>();
    p.source = j.at("source").get<std::string>();
    p.docstring = j.value("docstring", std::string{});
    p.island = j.value("island", 0);
    p.iteration = j.value("iteration", 0);
    p.model_name = j.value("model_name", std::string{});
    const auto it = j.find("parent_id");
    p.parent_id = (it != j.end() && !it->is_null()) ? std::optional(it->get<std::string>()) : std::nullopt;
}

void to_json(json& j, const EmpiricalScores& s) {
    j = {{"surjectivity", s.surjectivity}, {"injectivity", s.injectivity}, {"validity", s.validity},
         {"combined", s.combined},         {"defined_fraction", s.defined_fraction}};
}

void from_json(const json& j, EmpiricalScores& s) {
    j.at("surjectivity").get_to(s.surjectivity);
    j.at("injectivity").get_to(s.injectivity);
    j.at("validity").get_to(s.validity);
    j.at("combined").get_to(s.combined);
    j.at("defined_fraction").get_to(s.defined_fraction);
}

void to_json(json& j, const JudgeScores& s) {
    j = {{"cheating", s.cheating},   {"faithfulness", s.faithfulness}, {"simplicity", s.simplicity},
         {"reasoning", s.reasoning}, {"suggestions", s.suggestions}};
}

void from_json(const json& j, JudgeScores& s) {
    j.at("cheating").get_to(s.cheating);
    j.at("faithfulness").get_to(s.faithfulness);
    j.at("simplicity").get_to(s.simplicity);
    s.reasoning = j.value("reasoning", std::string{});
    s.suggestions = j.value("suggestions", std::string{});
}

json evaluation_to_json(const Evaluation& e, bool with_records) {
    json j = {{"empirical", e.empirical}, {"final_score", e.final_score}, {"n_eval", e.n_eval}};
    j["judge"] = e.judge ? json(*e.judge) : json(nullptr);
    if (with_records) j["records"] = e.records;
    return j;
}

void to_json(json& j, const Evaluation& e) { j = evaluation_to_json(e, true); }

void from_json(const json& j, Evaluation& e) {
    j.at("empirical").get_to(e.empirical);
    j.at("final_score").get_to(e.final_score);
    e.n_eval = j.value("n_eval", 0);
    const auto it = j.find("judge");
    e.judge = (it != j.end() && !it->is_null()) ? std::optional(it->get<JudgeScores>()) : std::nullopt;
    e.records = j.contains("records") ? j["records"].get<std::vector<OutputRecord>>() : std::vector<OutputRecord>{};
}

void to_json(json& j, const ExecutionLimits& l) {
    j = {{"per_input_timeout_ms", l.per_input_timeout_ms},
         {"total_timeout_ms", l.total_timeout_ms},
         {"memory_limit_mb", l.memory_limit_mb}};
}

void from_json(const json& j, ExecutionLimits& l) {
    l.per_input_timeout_ms = j.value("per_input_timeout_ms", l.per_input_timeout_ms);
    l.total_timeout_ms = j.value("total_timeout_ms", l.total_timeout_ms);
    l.memory_limit_mb = j.value("memory_limit_mb", l.memory_limit_mb);
}

}  // namespace catbij
