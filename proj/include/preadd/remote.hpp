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

// Client for an external inference server speaking "preadd-backend/1":
//
//   POST /v1/logprobs   {"context_tokens":[int,...]} -> {"logprobs":[float,...]}
//   POST /v1/tokenize   {"text": str}                -> {"tokens":[int,...]}
//   POST /v1/detokenize {"tokens":[int,...]}         -> {"text": str}
//   GET  /v1/meta                                    -> {"vocab_size":int,"eos_token":int|null,"model_name":str}
//
// Log-probabilities are natural log over the full vocabulary and already
// normalized by the server; null entries are read as -inf.

#include "preadd/backend.hpp"
#include "preadd/http.hpp"

namespace preadd {

inline constexpr const char *kProtocolVersion = "preadd-backend/1";

class RemoteBackend final : public Backend {
public:
    // Fetches /v1/meta; throws RemoteUnavailable when the server cannot be reached.
    explicit RemoteBackend(std::string base_url, RetryPolicy policy = {});

    const BackendDescriptor &descriptor() const override {
        return desc_;
    }
    LogProbVector next_token_logprobs(const Context &ctx) const override;
    Context tokenize(std::string_view text) const override;
    std::string detokenize(std::span<const TokenId> tokens) const override;

private:
    JsonHttpClient client_;
    BackendDescriptor desc_;
};

} // namespace preadd
