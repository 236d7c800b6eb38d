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

#include "catbij/llm.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "http_util.hpp"

namespace catbij {

using json = nlohmann::json;

std::string_view to_string(ChatFailureKind kind) {
    switch (kind) {
        case ChatFailureKind::network: return "network";
        case ChatFailureKind::rate_limit: return "rate_limit";
        case ChatFailureKind::server: return "server";
        case ChatFailureKind::client: return "client";
        case ChatFailureKind::protocol: return "protocol";
        case ChatFailureKind::script_exhausted: return "script_exhausted";
    }
    return "unknown";
}

const ModelSpec& sample_model(const std::vector<ModelSpec>& ensemble, std::mt19937_64& rng) {
    if (ensemble.empty()) throw std::invalid_argument("model ensemble is empty");
    std::vector<double> weights;
    weights.reserve(ensemble.size());
    for (const auto& m : ensemble) {
        if (!(m.sampling_weight > 0.0)) throw std::invalid_argument("sampling weight must be positive: " + m.name);
        weights.push_back(m.sampling_weight);
    }
    if (ensemble.size() == 1) return ensemble.front();
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return ensemble[pick(rng)];
}

ScriptedClient ScriptedClient::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mock script: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("mock script " + path + " is not valid JSON: " + e.what());
    }
    const json& list = doc.is_object() ? doc.at("responses") : doc;
    if (!list.is_array()) throw std::runtime_error("mock script must hold an array of strings: " + path);
    std::vector<std::string> responses;
    for (const auto& item : list) responses.push_back(item.get<std::string>());
    return ScriptedClient(std::move(responses));
}

ChatResponse ScriptedClient::complete(const ChatRequest& request, const ModelSpec&) {
    requests_.push_back(request);
    if (cursor_ >= responses_.size()) {
        throw ChatFailure(ChatFailureKind::script_exhausted, "mock script exhausted after " +
                                                                 std::to_string(responses_.size()) + " responses");
    }
    ChatResponse r;
    r.text = responses_[cursor_++];
    r.usage.prompt_tokens = static_cast<std::int64_t>((request.system.size() + request.user.size()) / 4);
    r.usage.completion_tokens = static_cast<std::int64_t>(r.text.size() / 4);
    return r;
}

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
    const double ms = static_cast<double>(base_delay.count()) * std::pow(multiplier, std::max(0, attempt - 1));
    return std::min(max_delay, std::chrono::milliseconds(static_cast<long long>(ms)));
}

HttpChatClient::HttpChatClient(RetryPolicy policy, int max_in_flight, std::chrono::seconds timeout)
    : policy_(policy),
      slots_(std::clamp(max_in_flight, 1, 64)),
      timeout_(timeout),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {}

ChatResponse HttpChatClient::complete(const ChatRequest& request, const ModelSpec& model) {
    if (model.is_mock()) throw ChatFailure(ChatFailureKind::client, "model " + model.name + " has no endpoint");
    const auto endpoint = detail::parse_endpoint(model.endpoint);

    json body = {
        {"model", model.name},
        {"messages", json::array({{{"role", "system"}, {"content", request.system}},
                                  {{"role", "user"}, {"content", request.user}}})},
        {"temperature", model.temperature},
        {"max_tokens", model.max_tokens},
    };
    std::map<std::string, std::string> headers;
    if (const auto key = api_key_for(model); !key.empty()) headers["Authorization"] = "Bearer " + key;
    const auto payload = body.dump();

    slots_.acquire();
    struct Release {
        std::counting_semaphore<64>& s;
        ~Release() { s.release(); }
    } release{slots_};

    const auto start = std::chrono::steady_clock::now();
    const auto result = detail::post_with_retries(policy_, sleeper_, [&] {
        return detail::post_json(endpoint, "/chat/completions", payload, headers, timeout_);
    });

    ChatResponse out;
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    try {
        const auto doc = json::parse(result.body);
        out.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (doc.contains("usage")) {
            const auto& u = doc["usage"];
            out.usage.prompt_tokens = u.value("prompt_tokens", std::int64_t{0});
            out.usage.completion_tokens = u.value("completion_tokens", std::int64_t{0});
        }
    } catch (const json::exception& e) {
        throw ChatFailure(ChatFailureKind::protocol, std::string("unexpected chat response: ") + e.what());
    }
    return out;
}

std::string api_key_for(const ModelSpec& model) {
    if (model.api_key_env.empty()) return {};
    const char* v = std::getenv(model.api_key_env.c_str());
    return v ? std::string(v) : std::string{};
}

}  // namespace catbij
