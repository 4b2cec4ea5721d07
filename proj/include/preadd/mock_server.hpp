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

// Reference server for the preadd-backend/1 protocol, backed by an in-process
// n-gram model. Used by the tests and by tools/preadd_mock_server.

#include "preadd/ngram.hpp"
#include "preadd/prefixes.hpp"
#include "preadd/scoring.hpp"

#include <atomic>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace preadd {

struct MockServerOptions {
    std::shared_ptr<const NgramBackend> backend;              // /v1/meta, logprobs, tokenize, detokenize
    std::shared_ptr<const AttributeScorer> scorer;            // POST /v1/score
    std::optional<std::string> scorer_key;                    // required bearer token for /v1/score
    std::shared_ptr<const Embedder> embedder;                 // POST /v1/embed
    std::set<std::string> positive_words, negative_words;     // POST /v1/classify
    int fail_first = 0;                                       // answer 503 to the first N requests
    int rate_limit_first = 0;                                 // answer 429 to the first N /v1/score requests
};

class MockServer {
public:
    explicit MockServer(MockServerOptions options);
    ~MockServer();
    MockServer(const MockServer &) = delete;
    MockServer &operator=(const MockServer &) = delete;

    // Binds (port 0 picks a free port) and serves on a background thread.
    void start(const std::string &host = "127.0.0.1", int port = 0);
    // Serves on the calling thread until stop().
    void listen_blocking(const std::string &host, int port);
    void stop();

    int port() const noexcept {
        return port_;
    }
    std::string url() const;
    std::size_t requests() const noexcept {
        return requests_.load();
    }

private:
    void install_routes();

    MockServerOptions opts_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
    std::string host_ = "127.0.0.1";
    std::atomic<std::size_t> requests_{0};
    std::atomic<int> failures_left_;
    std::atomic<int> rate_limits_left_;
};

} // namespace preadd
