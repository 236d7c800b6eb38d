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

#include "catbij/wire.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

#include "catbij/serialize.hpp"

namespace catbij::wire {

namespace {

using json = nlohmann::json;

std::string finish(const json& j) {
    auto line = j.dump(-1, ' ', false, json::error_handler_t::replace);
    line += '\n';
    if (line.size() > kMaxMessageBytes) throw WireError("wire message exceeds 1 MiB");
    return line;
}

json parse_object(std::string_view line, const char* what) {
    if (line.size() > kMaxMessageBytes) throw WireError(std::string(what) + " exceeds 1 MiB");
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw WireError(std::string("malformed ") + what + ": " + e.what());
    }
    if (!j.is_object()) throw WireError(std::string(what) + " is not an object");
    return j;
}

}  // namespace

std::string encode_request(const ExecutionRequest& request) {
    return finish({{"source", request.source}, {"inputs", request.inputs}, {"limits", request.limits}});
}

std::string encode_header(const ReplyHeader& header) {
    json j = {{"syntax_ok", header.syntax_ok}, {"runner_version", header.runner_version}};
    if (!header.message.empty()) j["message"] = header.message;
    return finish(j);
}

std::string encode_record(const OutputRecord& record) {
    // Oversized candidate output becomes an error record, not a broken stream.
    auto line = json(record).dump(-1, ' ', false, json::error_handler_t::replace) + '\n';
    if (line.size() > kMaxMessageBytes)
        return encode_record(OutputRecord::error(record.input_index, "output exceeds the message size limit"));
    return line;
}

ExecutionRequest decode_request(std::string_view line) {
    const auto j = parse_object(line, "request");
    try {
        ExecutionRequest r;
        r.source = j.at("source").get<std::string>();
        r.inputs = j.at("inputs").get<std::vector<std::string>>();
        if (j.contains("limits")) r.limits = j["limits"].get<ExecutionLimits>();
        return r;
    } catch (const json::exception& e) {
        throw WireError(std::string("bad request fields: ") + e.what());
    }
}

ReplyHeader decode_header(std::string_view line) {
    const auto j = parse_object(line, "reply header");
    try {
        ReplyHeader h;
        h.syntax_ok = j.at("syntax_ok").get<bool>();
        h.runner_version = j.value("runner_version", std::string{});
        h.message = j.value("message", std::string{});
        return h;
    } catch (const json::exception& e) {
        throw WireError(std::string("bad reply header: ") + e.what());
    }
}

OutputRecord decode_record(std::string_view line) {
    const auto j = parse_object(line, "record");
    OutputRecord r;
    try {
        r = j.get<OutputRecord>();
    } catch (const std::exception& e) {
        throw WireError(std::string("bad record: ") + e.what());
    }
    if ((r.status == RecordStatus::ok) != r.output.has_value())
        throw WireError("record output must be present exactly when status is ok");
    return r;
}

int serve(std::istream& in, std::ostream& out, CandidateExecutor& executor) {
    std::string line;
    if (!std::getline(in, line)) return 2;
    ExecutionRequest request;
    try {
        request = decode_request(line);
        validate_request(request);
    } catch (const std::exception& e) {
        out << encode_header({false, "", e.what()}) << std::flush;
        return 2;
    }
    const auto reply = executor.execute(request);
    out << encode_header({reply.syntax_ok, reply.runner_version, reply.message});
    if (reply.syntax_ok) {
        for (const auto& r : reply.records) out << encode_record(r);
    }
    out << std::flush;
    return out ? 0 : 1;
}

}  // namespace catbij::wire
