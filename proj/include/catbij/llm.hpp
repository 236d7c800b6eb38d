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

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace catbij {

/// One chat model in an ensemble.
struct ModelSpec {
    std::string name;
    std::string endpoint;  // base URL, e.g. https://api.example.com/v1; "mock" for scripted runs
    double sampling_weight = 1.0;
    double temperature = 0.7;
    int max_tokens = 4096;
    std::string api_key_env;  // environment variable holding the key

    bool is_mock() const { return endpoint.empty() || endpoint == "mock"; }
};

/// Picks a model with probability proportional to sampling_weight.
/// Throws std::invalid_argument on an empty ensemble or a nonpositive weight.
const ModelSpec& sample_model(const std::vector<ModelSpec>& ensemble, std::mt19937_64& rng);

struct ChatRequest {
    std::string system;
    std::string user;
};

struct TokenUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

struct ChatResponse {
    std::string text;
    TokenUsage usage;
    std::chrono::milliseconds latency{0};
};

enum class ChatFailureKind { network, rate_limit, server, client, protocol, script_exhausted };

std::string_view to_string(ChatFailureKind kind);

class ChatFailure : public std::runtime_error {
public:
    ChatFailure(ChatFailureKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ChatFailureKind kind() const { return kind_; }

private:
    ChatFailureKind kind_;
};

/// Messages in, text out. Implementations throw ChatFailure.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual ChatResponse complete(const ChatRequest& request, const ModelSpec& model) = 0;
    /// Called on resume with the number of calls the earlier session made.
    virtual void resume_from(std::size_t /*calls_made*/) {}
};

/// Replays a fixed sequence of responses, one per call, regardless of model.
/// Single stream: calls are serialized.
class ScriptedClient : public ChatClient {
public:
    explicit ScriptedClient(std::vector<std::string> responses) : responses_(std::move(responses)) {}

    /// Script file: a JSON array of strings, or an object {"responses": [...]}.
    static ScriptedClient from_file(const std::string& path);

    ChatResponse complete(const ChatRequest& request, const ModelSpec& model) override;
    void resume_from(std::size_t calls_made) override { cursor_ = calls_made; }

    std::size_t cursor() const { return cursor_; }
    void set_cursor(std::size_t c) { cursor_ = c; }
    std::size_t size() const { return responses_.size(); }
    /// Requests received so far, for inspection in tests.
    const std::vector<ChatRequest>& requests() const { return requests_; }

private:
    std::vector<std::string> responses_;
    std::vector<ChatRequest> requests_;
    std::size_t cursor_ = 0;
};

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds base_delay{500};
    std::chrono::milliseconds max_delay{30000};
    double multiplier = 2.0;

    /// Backoff before attempt `attempt` (1-based retry count).
    std::chrono::milliseconds backoff(int attempt) const;
};

/// OpenAI-compatible chat-completions client over HTTP(S). Retries network,
/// rate-limit and server failures with exponential backoff, honouring a
/// Retry-After header when the server sends one. At most `max_in_flight`
/// requests run concurrently.
class HttpChatClient : public ChatClient {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpChatClient(RetryPolicy policy = {}, int max_in_flight = 4,
                            std::chrono::seconds timeout = std::chrono::seconds(300));

    ChatResponse complete(const ChatRequest& request, const ModelSpec& model) override;

    /// Replaces the real sleep; used by tests to observe backoff delays.
    void set_sleeper(Sleeper s) { sleeper_ = std::move(s); }

private:
    RetryPolicy policy_;
    std::counting_semaphore<64> slots_;
    std::chrono::seconds timeout_;
    Sleeper sleeper_;
};

/// Reads the model's API key from its environment variable ("" if unset).
std::string api_key_for(const ModelSpec& model);

}  // namespace catbij
