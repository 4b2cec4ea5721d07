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

#include "preadd/types.hpp"

#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace preadd {

enum class BackendKind { Ngram, Remote };

struct BackendDescriptor {
    BackendKind kind = BackendKind::Ngram;
    std::size_t vocab_size = 0;
    // Token strings by id. Remote servers only report a size, so this may be empty.
    std::vector<std::string> vocab;
    std::optional<TokenId> eos_token;
    bool concurrent_safe = true;
    std::string model_name;
};

// A provider of next-token distributions.
class Backend {
public:
    virtual ~Backend() = default;

    virtual const BackendDescriptor &descriptor() const = 0;

    // Normalized log-probabilities of the next token given ctx.
    virtual LogProbVector next_token_logprobs(const Context &ctx) const = 0;

    virtual Context tokenize(std::string_view text) const = 0;
    virtual std::string detokenize(std::span<const TokenId> tokens) const = 0;

    std::size_t vocab_size() const {
        return descriptor().vocab_size;
    }

    // next_token_logprobs, serialized when the backend is not concurrent_safe.
    LogProbVector query(const Context &ctx) const {
        if (descriptor().concurrent_safe) {
            return next_token_logprobs(ctx);
        }
        std::lock_guard<std::mutex> lock(mu_);
        return next_token_logprobs(ctx);
    }

private:
    mutable std::mutex mu_;
};

} // namespace preadd
