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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "catbij/llm.hpp"

namespace catbij::detail {

struct Endpoint {
    std::string origin;     // scheme://host[:port]
    std::string base_path;  // without trailing slash
};

Endpoint parse_endpoint(std::string_view url);

struct HttpResult {
    int status = 0;
    std::string body;
    std::optional<std::chrono::milliseconds> retry_after;
};

/// Single POST; throws ChatFailure(network) when no response arrives.
HttpResult post_json(const Endpoint& endpoint, const std::string& path, const std::string& body,
                     const std::map<std::string, std::string>& headers, std::chrono::seconds timeout);

/// Maps a non-2xx status onto a failure kind.
ChatFailureKind classify_status(int status);

/// Runs `attempt` until it returns a 2xx result or the policy gives up.
/// Network, rate-limit and server failures are retried; anything else throws
/// at once.
HttpResult post_with_retries(const RetryPolicy& policy, const std::function<void(std::chrono::milliseconds)>& sleeper,
                             const std::function<HttpResult()>& attempt);

}  // namespace catbij::detail
