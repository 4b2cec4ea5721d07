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

// Reference decoders: plain sampling from the base model, instruction prompting,
// and FUDGE-style discriminator reweighting inside a top-k set.

#include "preadd/backend.hpp"
#include "preadd/decoding.hpp"
#include "preadd/http.hpp"
#include "preadd/ngram.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace preadd {

// Samples from the backend on a single context, truncating when cfg asks for it.
// cfg.alpha and cfg.truncate_before_control are ignored.
DecodeResult single_context_decode(const Backend &backend, Context ctx, const ControlConfig &cfg, CounterRng &rng);

// The base model on the raw prompt.
DecodeResult raw_decode(const Backend &backend, std::string_view prompt, const ControlConfig &cfg, CounterRng &rng);

// Ordinary prompting: the base model on instruction_prefix + separator + prompt.
DecodeResult instruction_prompt_decode(const Backend &backend, std::string_view instruction_prefix,
                                       std::string_view prompt, const ControlConfig &cfg, CounterRng &rng,
                                       std::string_view separator = " ");

class Discriminator {
public:
    virtual ~Discriminator() = default;
    // log P(attribute | text) in [kLogProbFloor, 0].
    virtual double logprob_attribute(const Context &text) const = 0;
};

// Two class-conditional n-gram models with equal priors; the posterior follows from Bayes' rule.
class NaiveBayesDiscriminator final : public Discriminator {
public:
    NaiveBayesDiscriminator(NgramModel attribute, NgramModel other);
    double logprob_attribute(const Context &text) const override;

private:
    NgramModel attribute_;
    NgramModel other_;
};

// Both corpora must already be tokenized with `vocab`. <unk> is part of each class model's support.
NaiveBayesDiscriminator train_nb_discriminator(const std::vector<std::vector<TokenId>> &attribute_corpus,
                                               const std::vector<std::vector<TokenId>> &other_corpus, int order,
                                               const Vocabulary &vocab, double smoothing = 1.0);

// Whitespace-tokenizes each line with `vocab`.
NaiveBayesDiscriminator train_nb_discriminator(const std::vector<std::string> &attribute_lines,
                                               const std::vector<std::string> &other_lines, int order,
                                               const Vocabulary &vocab, double smoothing = 1.0);

// POST /v1/classify {"text": str} -> {"logprob_attribute": float}; contexts are
// detokenized with the generator backend first.
class RemoteDiscriminator final : public Discriminator {
public:
    RemoteDiscriminator(std::string base_url, const Backend &generator, RetryPolicy policy = {});
    double logprob_attribute(const Context &text) const override;

private:
    JsonHttpClient client_;
    const Backend &generator_;
};

// Keeps the top_k tokens of base, adds log P(attribute | ctx + v) to each survivor v,
// renormalizes over the survivors.
LogProbVector fudge_step(const LogProbVector &base, const Discriminator &disc, const Context &ctx, std::size_t top_k);

inline constexpr std::size_t kFudgeTopK = 100;

// Token-by-token FUDGE decoding; top_k is clipped to the vocabulary size.
DecodeResult fudge_decode(const Backend &backend, Context raw, const Discriminator &disc, const ControlConfig &cfg,
                          CounterRng &rng, std::size_t top_k = kFudgeTopK);

} // namespace preadd
