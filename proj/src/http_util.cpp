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

#include "http_util.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>

namespace catbij::detail {

Endpoint parse_endpoint(std::string_view url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) throw std::invalid_argument("endpoint needs a scheme: " + std::string(url));
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = std::string(url.substr(0, path_start));
    if (path_start != std::string_view::npos) e.base_path = std::string(url.substr(path_start));
    while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
    return e;
}

HttpResult post_json(const Endpoint& endpoint, const std::string& path, const std::string& body,
                     const std::map<std::string, std::string>& headers, std::chrono::seconds timeout) {
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(endpoint.base_path + path, h, body, "application/json");
    if (!res) throw ChatFailure(ChatFailureKind::network, "request failed: " + httplib::to_string(res.error()));
    HttpResult out;
    out.status = res->status;
    out.body = res->body;
    if (res->has_header("Retry-After")) {
        try {
            const double seconds = std::stod(res->get_header_value("Retry-After"));
            if (seconds >= 0) out.retry_after = std::chrono::milliseconds(static_cast<long>(std::ceil(seconds * 1000)));
        } catch (const std::exception&) {
            // HTTP-date form is not honoured; fall back to backoff.
        }
    }
    return out;
}

ChatFailureKind classify_status(int status) {
    if (status == 429) return ChatFailureKind::rate_limit;
    if (status >= 500) return ChatFailureKind::server;
    return ChatFailureKind::client;
}

HttpResult post_with_retries(const RetryPolicy& policy, const std::function<void(std::chrono::milliseconds)>& sleeper,
                             const std::function<HttpResult()>& attempt) {
    for (int i = 1;; ++i) {
        std::optional<std::chrono::milliseconds> advised;
        ChatFailureKind kind{};
        std::string message;
        try {
            auto result = attempt();
            if (result.status >= 200 && result.status < 300) return result;
            kind = classify_status(result.status);
            advised = result.retry_after;
            message = "HTTP " + std::to_string(result.status) + ": " + result.body.substr(0, 500);
        } catch (const ChatFailure& f) {
            if (f.kind() != ChatFailureKind::network) throw;
            kind = f.kind();
            message = f.what();
        }
        if (kind == ChatFailureKind::client || i >= policy.max_attempts) throw ChatFailure(kind, message);
        auto delay = policy.backoff(i);
        if (advised) delay = std::max(delay, *advised);
        sleeper(delay);
    }
}

}  // namespace catbij::detail
