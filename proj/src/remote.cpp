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

#include "preadd/remote.hpp"

#include "preadd/decoding.hpp"
#include "preadd/error.hpp"
#include "preadd/kernels.hpp"

#include <cmath>

namespace preadd {

namespace {

std::vector<TokenId> read_tokens(const nlohmann::json &arr, std::size_t vocab_size) {
    if (!arr.is_array()) {
        throw Error(ErrorKind::BackendError, "expected a token array");
    }
    std::vector<TokenId> out;
    out.reserve(arr.size());
    for (const auto &t : arr) {
        if (!t.is_number_integer() || t.get<long long>() < 0) {
            throw Error(ErrorKind::BackendError, "token ids must be non-negative integers");
        }
        const auto id = t.get<unsigned long long>();
        if (vocab_size != 0 && id >= vocab_size) {
            throw Error(ErrorKind::TokenOutOfRange, "server returned token " + std::to_string(id));
        }
        out.push_back(static_cast<TokenId>(id));
    }
    return out;
}

} // namespace

RemoteBackend::RemoteBackend(std::string base_url, RetryPolicy policy) : client_(std::move(base_url), policy) {
    const nlohmann::json meta = client_.get("/v1/meta");
    try {
        desc_.kind = BackendKind::Remote;
        desc_.vocab_size = meta.at("vocab_size").get<std::size_t>();
        if (meta.contains("eos_token") && !meta["eos_token"].is_null()) {
            desc_.eos_token = meta["eos_token"].get<TokenId>();
        }
        desc_.model_name = meta.value("model_name", std::string("remote"));
        desc_.concurrent_safe = true;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::BackendError, std::string("malformed /v1/meta response: ") + e.what());
    }
    if (desc_.vocab_size == 0) {
        throw Error(ErrorKind::BackendError, "server reports an empty vocabulary");
    }
}

LogProbVector RemoteBackend::next_token_logprobs(const Context &ctx) const {
    for (TokenId t : ctx.tokens) {
        if (t >= desc_.vocab_size) {
            throw Error(ErrorKind::TokenOutOfRange, "token id " + std::to_string(t) + " outside vocabulary");
        }
    }
    const nlohmann::json res = client_.post("/v1/logprobs", {{"context_tokens", ctx.tokens}});
    const auto it = res.find("logprobs");
    if (it == res.end() || !it->is_array()) {
        throw Error(ErrorKind::BackendError, "response lacks a logprobs array");
    }
    if (it->size() != desc_.vocab_size) {
        throw Error(ErrorKind::BackendError, "expected " + std::to_string(desc_.vocab_size) + " logprobs, got " +
                                                 std::to_string(it->size()));
    }
    std::vector<double> values;
    values.reserve(it->size());
    for (const auto &v : *it) {
        values.push_back(v.is_null() ? kNegInf : v.get<double>());
    }
    const double lse = kernels::logsumexp(values);
    if (!(std::abs(lse) <= 1e-6)) {
        throw Error(ErrorKind::BackendError, "server logprobs are not normalized (logsumexp=" + std::to_string(lse) + ")");
    }
    bool below_floor = false;
    for (double v : values) {
        below_floor = below_floor || (std::isfinite(v) && v < kLogProbFloor);
    }
    if (below_floor) {
        return renormalize(std::move(values));
    }
    return LogProbVector(std::move(values)); // already normalized by the server; keep its bits
}

Context RemoteBackend::tokenize(std::string_view text) const {
    const nlohmann::json res = client_.post("/v1/tokenize", {{"text", std::string(text)}});
    if (!res.contains("tokens")) {
        throw Error(ErrorKind::BackendError, "response lacks tokens");
    }
    return Context(read_tokens(res["tokens"], desc_.vocab_size));
}

std::string RemoteBackend::detokenize(std::span<const TokenId> tokens) const {
    const nlohmann::json res =
        client_.post("/v1/detokenize", {{"tokens", std::vector<TokenId>(tokens.begin(), tokens.end())}});
    if (!res.contains("text") || !res["text"].is_string()) {
        throw Error(ErrorKind::BackendError, "response lacks text");
    }
    return res["text"].get<std::string>();
}

} // namespace preadd
