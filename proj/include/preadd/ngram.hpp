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

// Word-level n-gram language model with additive smoothing and backoff.
//
// Counts are kept for every context length 0..n-1. A query uses the longest
// suffix of the context (at most n-1 tokens) that was seen in training and
// returns (count(c, t) + a) / (count(c, .) + a * |S|), where S is the set of
// tokens the model may emit.
//
// Token id 0 is always <unk>. Generators leave it out of S so they never emit it;
// class-conditional models for discriminators keep it in S so unknown input words
// receive mass.

#include "preadd/backend.hpp"
#include "preadd/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace preadd {

class Vocabulary {
public:
    static constexpr TokenId kUnk = 0;
    static constexpr std::string_view kUnkText = "<unk>";

    Vocabulary();

    // <unk> followed by every distinct word of the corpus in order of first appearance.
    static Vocabulary from_sequences(const std::vector<std::vector<std::string>> &sequences);

    TokenId add(const std::string &word);
    TokenId id(std::string_view word) const; // kUnk when absent
    bool contains(std::string_view word) const;
    const std::string &word(TokenId id) const;
    std::size_t size() const noexcept {
        return words_.size();
    }
    const std::vector<std::string> &words() const noexcept {
        return words_;
    }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, TokenId> index_;
};

std::vector<std::string> split_whitespace(std::string_view text);

struct TokenSeqHash {
    std::size_t operator()(const std::vector<TokenId> &seq) const noexcept;
};

struct NgramCounts {
    std::map<TokenId, std::uint64_t> next; // sparse, ordered for deterministic iteration
    std::uint64_t total = 0;
};

class NgramModel {
public:
    using Table = std::unordered_map<std::vector<TokenId>, NgramCounts, TokenSeqHash>;

    NgramModel(int order, double smoothing, Vocabulary vocab, bool unk_in_support);

    int order() const noexcept {
        return order_;
    }
    double smoothing() const noexcept {
        return smoothing_;
    }
    const Vocabulary &vocab() const noexcept {
        return vocab_;
    }
    bool unk_in_support() const noexcept {
        return unk_in_support_;
    }
    std::size_t support_size() const noexcept {
        return vocab_.size() - (unk_in_support_ ? 0 : 1);
    }

    // Counts for contexts of exactly `length` tokens.
    const Table &table(int length) const {
        return tables_.at(static_cast<std::size_t>(length));
    }

    // Counts row used for ctx after backoff.
    const NgramCounts &row_for(std::span<const TokenId> ctx) const;

    // Smoothed P(token | ctx) as a ratio of counts.
    double probability(std::span<const TokenId> ctx, TokenId token) const;

    // log P(tokens) under the chain rule, starting from an empty history.
    double sequence_logprob(std::span<const TokenId> tokens) const;

    // Full-vocabulary log-probabilities for the next token; <unk> is -inf when it
    // is outside the support.
    std::vector<double> next_logprobs(std::span<const TokenId> ctx) const;

    void observe(std::span<const TokenId> sequence);

private:
    int order_;
    double smoothing_;
    Vocabulary vocab_;
    bool unk_in_support_;
    std::vector<Table> tables_;
};

// Counts every sequence into a fresh model of the given order.
// Throws EmptyCorpus when there are no tokens, ConfigError on order < 1 or smoothing <= 0.
NgramModel train_ngram(const std::vector<std::vector<TokenId>> &sequences, int order, double smoothing,
                       Vocabulary vocab, bool unk_in_support = false);

// One sequence per non-empty line, whitespace tokenized; vocabulary from the corpus.
NgramModel train_ngram_from_lines(const std::vector<std::string> &lines, int order, double smoothing = 1.0,
                                  bool unk_in_support = false);

class NgramBackend final : public Backend {
public:
    explicit NgramBackend(std::shared_ptr<const NgramModel> model, std::optional<TokenId> eos = std::nullopt,
                          std::string name = "ngram");

    const BackendDescriptor &descriptor() const override {
        return desc_;
    }
    LogProbVector next_token_logprobs(const Context &ctx) const override;
    Context tokenize(std::string_view text) const override;
    std::string detokenize(std::span<const TokenId> tokens) const override;

    const NgramModel &model() const noexcept {
        return *model_;
    }

private:
    std::shared_ptr<const NgramModel> model_;
    BackendDescriptor desc_;
};

} // namespace preadd
