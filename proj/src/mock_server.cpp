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

#include "preadd/mock_server.hpp"

#include "preadd/error.hpp"
#include "preadd/http.hpp"

#include <cmath>

#include <httplib.h>

namespace preadd {

namespace {

void reply(httplib::Response &res, const nlohmann::json &body, int status = 200) {
    res.status = status;
    res.set_content(dump_json(body), "application/json");
}

} // namespace

MockServer::MockServer(MockServerOptions options)
    : opts_(std::move(options)), server_(std::make_unique<httplib::Server>()), failures_left_(opts_.fail_first),
      rate_limits_left_(opts_.rate_limit_first) {
    install_routes();
}

MockServer::~MockServer() {
    stop();
}

std::string MockServer::url() const {
    return "http://" + host_ + ":" + std::to_string(port_);
}

void MockServer::install_routes() {
    auto &srv = *server_;

    srv.set_pre_routing_handler([this](const httplib::Request &, httplib::Response &res) {
        ++requests_;
        if (failures_left_.fetch_sub(1) > 0) {
            reply(res, {{"error", "injected failure"}}, 503);
            return httplib::Server::HandlerResponse::Handled;
        }
        return httplib::Server::HandlerResponse::Unhandled;
    });

    auto guarded = [](auto fn) {
        return [fn](const httplib::Request &req, httplib::Response &res) {
            try {
                nlohmann::json body = req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body);
                fn(body, req, res);
            } catch (const nlohmann::json::exception &e) {
                reply(res, {{"error", e.what()}}, 400);
            } catch (const Error &e) {
                reply(res, {{"error", e.what()}}, 400);
            }
        };
    };

    srv.Get("/v1/meta", [this](const httplib::Request &, httplib::Response &res) {
        if (!opts_.backend) {
            reply(res, {{"error", "no backend"}}, 404);
            return;
        }
        const auto &d = opts_.backend->descriptor();
        nlohmann::json eos = nullptr;
        if (d.eos_token) {
            eos = *d.eos_token;
        }
        reply(res, {{"vocab_size", d.vocab_size}, {"eos_token", eos}, {"model_name", d.model_name},
                    {"protocol", "preadd-backend/1"}});
    });

    srv.Post("/v1/logprobs", guarded([this](const nlohmann::json &body, const httplib::Request &, httplib::Response &res) {
                 const auto tokens = body.at("context_tokens").get<std::vector<TokenId>>();
                 const LogProbVector lp = opts_.backend->next_token_logprobs(Context(tokens));
                 reply(res, {{"logprobs", lp.values}});
             }));

    srv.Post("/v1/tokenize", guarded([this](const nlohmann::json &body, const httplib::Request &, httplib::Response &res) {
                 const Context c = opts_.backend->tokenize(body.at("text").get<std::string>());
                 reply(res, {{"tokens", c.tokens}});
             }));

    srv.Post("/v1/detokenize",
             guarded([this](const nlohmann::json &body, const httplib::Request &, httplib::Response &res) {
                 const auto tokens = body.at("tokens").get<std::vector<TokenId>>();
                 reply(res, {{"text", opts_.backend->detokenize(tokens)}});
             }));

    srv.Post("/v1/embed", guarded([this](const nlohmann::json &body, const httplib::Request &, httplib::Response &res) {
                 if (!opts_.embedder) {
                     reply(res, {{"error", "no embedder"}}, 404);
                     return;
                 }
                 reply(res, {{"embedding", opts_.embedder->embed(body.at("text").get<std::string>()).values}});
             }));

    srv.Post("/v1/classify", guarded([this](const nlohmann::json &body, const httplib::Request &, httplib::Response &res) {
                 // Add-one smoothed share of positive lexicon hits.
                 double pos = 1.0;
                 double neg = 1.0;
                 for (const auto &w : plain_words(body.at("text").get<std::string>())) {
                     pos += static_cast<double>(opts_.positive_words.count(w));
                     neg += static_cast<double>(opts_.negative_words.count(w));
                 }
                 reply(res, {{"logprob_attribute", std::log(pos / (pos + neg))}});
             }));

    srv.Post("/v1/score", guarded([this](const nlohmann::json &body, const httplib::Request &req, httplib::Response &res) {
                 if (!opts_.scorer) {
                     reply(res, {{"error", "no scorer"}}, 404);
                     return;
                 }
                 if (opts_.scorer_key && req.get_header_value("Authorization") != "Bearer " + *opts_.scorer_key) {
                     reply(res, {{"error", "unauthorized"}}, 401);
                     return;
                 }
                 if (rate_limits_left_.fetch_sub(1) > 0) {
                     res.set_header("Retry-After", "0");
                     reply(res, {{"error", "slow down"}}, 429);
                     return;
                 }
                 reply(res, {{"score", opts_.scorer->score(body.at("text").get<std::string>())}});
             }));
}

void MockServer::start(const std::string &host, int port) {
    host_ = host;
    if (port == 0) {
        port_ = server_->bind_to_any_port(host);
    } else if (server_->bind_to_port(host, port)) {
        port_ = port;
    } else {
        port_ = -1;
    }
    if (port_ <= 0) {
        throw Error(ErrorKind::RemoteUnavailable, "mock server could not bind " + host);
    }
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void MockServer::listen_blocking(const std::string &host, int port) {
    host_ = host;
    port_ = port;
    if (!server_->listen(host, port)) {
        throw Error(ErrorKind::RemoteUnavailable, "mock server could not listen on " + url());
    }
}

void MockServer::stop() {
    if (server_) {
        server_->stop();
    }
    if (thread_.joinable()) {
        thread_.join();
    }
}

} // namespace preadd
