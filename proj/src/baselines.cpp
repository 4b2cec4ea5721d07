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

#include "preadd/baselines.hpp"

#include "preadd/error.hpp"
#include "preadd/prefixes.hpp"

#include <algorithm>
#include <cmath>

namespace preadd {

DecodeResult single_context_decode(const Backend &backend, Context ctx, const ControlConfig &cfg, CounterRng &rng) {
    cfg.validate();
    if (ctx.empty()) {
        throw Error(ErrorKind::ContextMismatch, "context is empty");
    }
    const auto eos = backend.descriptor().eos_token;
    DecodeResult result;
    for (std::size_t step = 0; step < cfg.max_tokens; ++step) {
        LogProbVector dist = backend.query(ctx);
        LogProbVector sampled = cfg.truncation_enabled() ? truncate(dist, cfg.top_k, cfg.top_p).renormalized : dist;
        const TokenId token = sample_token(sampled, rng);
        result.tokens.push_back(token);
        DecodeStep rec;
        rec.token = token;
        rec.prefixed = dist;
        rec.base = std::move(dist);
        rec.combined = std::move(sampled);
        result.trace.push_back(std::move(rec));
        ctx.push_back(token);
        if (eos && token == *eos) {
            result.stopped_at_eos = true;
            break;
        }
    }
    return result;
}

DecodeResult raw_decode(const Backend &backend, std::string_view prompt, const ControlConfig &cfg, CounterRng &rng) {
    Context ctx = backend.tokenize(prompt);
    if (ctx.empty()) {
        throw Error(ErrorKind::EmptyInput, "prompt tokenizes to nothing");
    }
    return single_context_decode(backend, std::move(ctx), cfg, rng);
}

DecodeResult instruction_prompt_decode(const Backend &backend, std::string_view instruction_prefix,
                                       std::string_view prompt, const ControlConfig &cfg, CounterRng &rng,
                                       std::string_view separator) {
    ContextPair ctx = build_contexts(backend, instruction_prefix, prompt, separator);
    return single_context_decode(backend, std::move(ctx.prefixed), cfg, rng);
}

NaiveBayesDiscriminator::NaiveBayesDiscriminator(NgramModel attribute, NgramModel other)
    : attribute_(std::move(attribute)), other_(std::move(other)) {
    if (attribute_.vocab().words() != other_.vocab().words()) {
        throw Error(ErrorKind::ConfigError, "class models must share a vocabulary");
    }
}

double NaiveBayesDiscriminator::logprob_attribute(const Context &text) const {
    const double a = attribute_.sequence_logprob(text.tokens);
    const double b = other_.sequence_logprob(text.tokens);
    const double m = std::max(a, b);
    const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
    return std::clamp(a - lse, kLogProbFloor, 0.0);
}

NaiveBayesDiscriminator train_nb_discriminator(const std::vector<std::vector<TokenId>> &attribute_corpus,
                                               const std::vector<std::vector<TokenId>> &other_corpus, int order,
                                               const Vocabulary &vocab, double smoothing) {
    return NaiveBayesDiscriminator(train_ngram(attribute_corpus, order, smoothing, vocab, true),
                                   train_ngram(other_corpus, order, smoothing, vocab, true));
}

NaiveBayesDiscriminator train_nb_discriminator(const std::vector<std::string> &attribute_lines,
                                               const std::vector<std::string> &other_lines, int order,
                                               const Vocabulary &vocab, double smoothing) {
    auto tokenize_all = [&](const std::vector<std::string> &lines) {
        std::vector<std::vector<TokenId>> out;
        for (const auto &line : lines) {
            std::vector<TokenId> seq;
            for (const auto &w : split_whitespace(line)) {
                seq.push_back(vocab.id(w));
            }
            if (!seq.empty()) {
                out.push_back(std::move(seq));
            }
        }
        return out;
    };
    return train_nb_discriminator(tokenize_all(attribute_lines), tokenize_all(other_lines), order, vocab, smoothing);
}

RemoteDiscriminator::RemoteDiscriminator(std::string base_url, const Backend &generator, RetryPolicy policy)
    : client_(std::move(base_url), policy), generator_(generator) {}

double RemoteDiscriminator::logprob_attribute(const Context &text) const {
    nlohmann::json res;
    try {
        res = client_.post("/v1/classify", {{"text", generator_.detokenize(text.tokens)}});
    } catch (const Error &e) {
        throw Error(ErrorKind::DiscriminatorError, e.what());
    }
    if (!res.contains("logprob_attribute") || !res["logprob_attribute"].is_number()) {
        throw Error(ErrorKind::DiscriminatorError, "response lacks logprob_attribute");
    }
    return std::clamp(res["logprob_attribute"].get<double>(), kLogProbFloor, 0.0);
}

LogProbVector fudge_step(const LogProbVector &base, const Discriminator &disc, const Context &ctx, std::size_t top_k) {
    if (top_k < 1) {
        throw Error(ErrorKind::InvalidK, "top_k must be >= 1");
    }
    const Truncation t = truncate(base, std::min(top_k, base.size()), std::nullopt);
    std::vector<double> values(base.size(), kNegInf);
    Context extended = ctx;
    extended.push_back(0);
    for (std::size_t v = 0; v < base.size(); ++v) {
        if (!t.mask[v]) {
            continue;
        }
        extended.tokens.back() = static_cast<TokenId>(v);
        const double attr = disc.logprob_attribute(extended);
        if (!std::isfinite(attr) || attr > 0.0) {
            throw Error(ErrorKind::DiscriminatorError, "discriminator returned an invalid log-probability");
        }
        values[v] = t.renormalized[v] + attr;
    }
    return renormalize(std::move(values));
}

DecodeResult fudge_decode(const Backend &backend, Context raw, const Discriminator &disc, const ControlConfig &cfg,
                          CounterRng &rng, std::size_t top_k) {
    cfg.validate();
    if (raw.empty()) {
        throw Error(ErrorKind::ContextMismatch, "context is empty");
    }
    const auto eos = backend.descriptor().eos_token;
    const std::size_t k = std::min(top_k, backend.vocab_size());
    DecodeResult result;
    for (std::size_t step = 0; step < cfg.max_tokens; ++step) {
        LogProbVector base = backend.query(raw);
        LogProbVector guided = fudge_step(base, disc, raw, k);
        const TokenId token = sample_token(guided, rng);
        result.tokens.push_back(token);
        DecodeStep rec;
        rec.token = token;
        rec.prefixed = base;
        rec.base = std::move(base);
        rec.combined = std::move(guided);
        result.trace.push_back(std::move(rec));
        raw.push_back(token);
        if (eos && token == *eos) {
            result.stopped_at_eos = true;
            break;
        }
    }
    return result;
}

} // namespace preadd
