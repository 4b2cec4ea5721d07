// Copyright 2026 The preadd Authors
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

#include "preadd/http.hpp"

#include "preadd/error.hpp"

#include <thread>

#include <httplib.h>

namespace preadd {

JsonHttpClient::JsonHttpClient(std::string base_url, RetryPolicy policy,
                               std::vector<std::pair<std::string, std::string>> headers)
    : base_url_(std::move(base_url)), policy_(policy), headers_(std::move(headers)) {
    while (!base_url_.empty() && base_url_.back() == '/') {
        base_url_.pop_back();
    }
    if (base_url_.empty()) {
        throw Error(ErrorKind::ConfigError, "empty endpoint URL");
    }
}

nlohmann::json JsonHttpClient::get(const std::string &path) const {
    return request("GET", path, nullptr);
}

nlohmann::json JsonHttpClient::post(const std::string &path, const nlohmann::json &body) const {
    return request("POST", path, &body);
}

nlohmann::json JsonHttpClient::request(const std::string &method, const std::string &path,
                                       const nlohmann::json *body) const {
    httplib::Headers headers;
    for (const auto &[k, v] : headers_) {
        headers.emplace(k, v);
    }
    const std::string payload = body ? dump_json(*body) : std::string();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(policy_.timeout - secs);

    std::string last_error;
    auto backoff = policy_.backoff_base;
    for (int attempt = 0; attempt <= policy_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client cli(base_url_);
        cli.set_connection_timeout(secs.count(), static_cast<time_t>(usecs.count()));
        cli.set_read_timeout(secs.count(), static_cast<time_t>(usecs.count()));
        cli.set_write_timeout(secs.count(), static_cast<time_t>(usecs.count()));

        httplib::Result res = method == "GET" ? cli.Get(path, headers)
                                              : cli.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429) {
            std::string retry_after = res->get_header_value("Retry-After");
            throw Error(ErrorKind::RateLimited,
                        base_url_ + path + " rate limited; retry-after=" + (retry_after.empty() ? "?" : retry_after));
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw Error(ErrorKind::BackendError, base_url_ + path + " returned HTTP " + std::to_string(res->status) +
                                                     ": " + res->body);
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception &e) {
            throw Error(ErrorKind::BackendError, base_url_ + path + " returned malformed JSON: " + e.what());
        }
    }
    throw Error(ErrorKind::RemoteUnavailable, base_url_ + path + " unreachable after " +
                                                  std::to_string(policy_.retries + 1) + " attempts: " + last_error);
}

std::string dump_json(const nlohmann::json &j) {
    return j.dump();
}

} // namespace preadd
