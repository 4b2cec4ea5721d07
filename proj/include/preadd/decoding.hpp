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

// Prefix-adaptive decoding.
//
// Each step queries the backend twice: once on the raw context and once on the
// same context with a control prefix prepended. With d = log P_prefixed - log P_raw,
// the next token is drawn from
//
//     log P_raw + alpha * d   (renormalized)
//
// i.e. proportional to P_prefixed^alpha * P_raw^(1 - alpha). alpha = 0 is the base
// model, alpha = 1 is ordinary prompting with the prefix, alpha < 0 steers away
// from whatever the prefix encourages and alpha > 1 amplifies it.

#include "preadd/backend.hpp"
#include "preadd/rng.hpp"
#include "preadd/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace preadd {

struct ControlConfig {
    double alpha = 0.0;
    std::optional<std::size_t> top_k;
    std::optional<double> top_p;
    // Compute the truncation mask on the base distribution and apply it to both
    // inputs before combining. When false the combined distribution is truncated.
    bool truncate_before_control = true;
    std::size_t max_tokens = 32;
    std::uint64_t seed = 0;

    bool truncation_enabled() const noexcept {
        return top_k.has_value() || top_p.has_value();
    }

    // Throws ConfigError on max_tokens == 0 or an out-of-range top_p.
    void validate() const;
};

// Stable log-softmax. -inf entries are allowed as long as one entry is finite.
// Entries are clamped to kLogProbFloor and the vector renormalized once.
LogProbVector normalize(std::span<const double> raw_logits);

// Like normalize, but entries that are -inf (masked) stay -inf.
LogProbVector renormalize(std::vector<double> values);

// normalize(base + alpha * (prefixed - base)). alpha == 0 and alpha == 1 return
// the corresponding input unchanged. Masked (-inf) entries in either input stay masked.
LogProbVector combine(const LogProbVector &base, const LogProbVector &prefixed, double alpha);

struct Truncation {
    std::vector<bool> mask;
    // Same length as the input; dropped entries are -inf.
    LogProbVector renormalized;
    std::size_t kept = 0;
};

// Top-k and/or nucleus truncation. With both set the masks are intersected; with
// neither set the distribution is returned unchanged. Equal probabilities are
// ranked by lower token id.
Truncation truncate(const LogProbVector &dist, std::optional<std::size_t> top_k, std::optional<double> top_p);

// Entries outside mask set to -inf, survivors renormalized.
LogProbVector restrict_to(const LogProbVector &dist, const std::vector<bool> &mask);

// Inverse-CDF draw from exp(dist). Consumes exactly one value from rng.
TokenId sample_token(const LogProbVector &dist, CounterRng &rng);

struct DecodeStep {
    LogProbVector base;     // backend output on the raw context
    LogProbVector prefixed; // backend output on the prefixed context
    LogProbVector combined; // distribution the token was drawn from
    TokenId token = 0;
};

struct DecodeResult {
    std::vector<TokenId> tokens;
    std::vector<DecodeStep> trace;
    bool stopped_at_eos = false;
};

// Token-by-token prefix-adaptive decoding. `prefixed` must end with `raw`; both
// contexts receive every sampled token. When keep_trace is false the trace only
// records sampled tokens.
DecodeResult decode(const Backend &backend, Context raw, Context prefixed, const ControlConfig &cfg,
                    CounterRng &rng, bool keep_trace = true);

// Same, with a generator seeded from cfg.seed.
DecodeResult decode(const Backend &backend, Context raw, Context prefixed, const ControlConfig &cfg);

// The distribution one decode step samples from, given the two backend outputs.
LogProbVector control_step(const LogProbVector &base, const LogProbVector &prefixed, const ControlConfig &cfg);

} // namespace preadd
