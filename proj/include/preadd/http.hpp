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

#pragma once

#include <chrono>
#include <string>
#include <vector>
#include <utility>

#include <json.hpp>

namespace preadd {

struct RetryPolicy {
    std::chrono::milliseconds timeout{30000};
    int retries = 3;
    std::chrono::milliseconds backoff_base{1000}; // doubled after every failed attempt
};

// JSON-over-HTTP client for the "preadd-backend/1" endpoints.
//
// Connection failures and 5xx responses are retried with exponential backoff;
// every attempt opens its own connection so one client may be shared by threads.
// 429 responses raise RateLimited immediately (carrying Retry-After in the message)
// so callers with their own pacing can decide what to do.
class JsonHttpClient {
public:
    explicit JsonHttpClient(std::string base_url, RetryPolicy policy = {},
                            std::vector<std::pair<std::string, std::string>> headers = {});

    nlohmann::json get(const std::string &path) const;
    nlohmann::json post(const std::string &path, const nlohmann::json &body) const;

    const std::string &base_url() const noexcept {
        return base_url_;
    }
    const RetryPolicy &policy() const noexcept {
        return policy_;
    }

private:
    nlohmann::json request(const std::string &method, const std::string &path, const nlohmann::json *body) const;

    std::string base_url_;
    RetryPolicy policy_;
    std::vector<std::pair<std::string, std::string>> headers_;
};

// Serializes a JSON document with round-trip float precision.
std::string dump_json(const nlohmann::json &j);

} // namespace preadd
