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

#include "preadd/backend.hpp"
#include "preadd/prefixes.hpp"
#include "preadd/scoring.hpp"
#include "preadd/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace preadd {

// exp(-(1/n) * sum_i log P(c_i | prompt + c_<i)) under the evaluator.
double conditional_perplexity(const Backend &evaluator, const Context &prompt, const Context &continuation);

// Cosine similarity of the two embeddings; 0 if either is empty.
double relevance(const Embedder &embedder, std::string_view prompt, std::string_view continuation);

// Scores through the client: cached, rate limited, empty text skipped.
ScoreResult toxicity_score(ScorerClient &client, std::string_view text);

struct PronounSets {
    std::vector<std::string> female{"she", "her", "hers"};
    std::vector<std::string> male{"he", "him", "his"};

    void validate() const;
};

struct PronounIds {
    std::vector<TokenId> female;
    std::vector<TokenId> male;
};

// First token of each pronoun form, with and without a leading space; duplicates
// dropped. Throws PronounUnresolved when a form maps to no usable token (the
// n-gram backend's <unk> does not count).
PronounIds resolve_pronouns(const Backend &backend, const PronounSets &sets);

struct PronounBias {
    double p_female = 0.5;
    double bias = 0.0;
};

// p_female = F / (F + M) over first-token probability mass; bias = |0.5 - p_female|.
PronounBias pronoun_bias(const LogProbVector &dist, const PronounIds &ids);
PronounBias pronoun_bias(const LogProbVector &dist, const Backend &backend, const PronounSets &sets);

struct BiasAggregate {
    std::map<std::string, double> per_occupation; // mean p_female
    double overall = 0.0;                         // mean over occupations of |0.5 - mean p_female|
};

BiasAggregate aggregate_bias(const std::vector<std::pair<std::string, double>> &records);

// Fraction of continuations the classifier labels with the target sentiment.
double success_rate(const SentimentClassifier &classifier, const std::vector<std::string> &continuations,
                    Sentiment target);

struct EvalRecord {
    std::string prompt_id;
    std::string method;
    std::string continuation;
    std::optional<std::string> occupation;
    std::optional<double> toxicity;
    std::optional<double> full_toxicity; // prompt + continuation scored together
    std::optional<double> fluency_ppl;
    std::optional<double> relevance;
    std::optional<bool> success;
    std::optional<double> p_female;
    std::optional<double> attribute_mass; // mean per-step mass on attribute tokens
};

struct MetricMean {
    double mean = 0.0;
    std::size_t count = 0;
    std::size_t missing = 0;

    bool present() const noexcept {
        return count > 0;
    }
};

struct SummaryRow {
    std::string method;
    std::size_t records = 0;
    MetricMean toxicity;
    MetricMean full_toxicity;
    MetricMean fluency;
    MetricMean relevance;
    MetricMean success;
    MetricMean attribute_mass;
    std::optional<double> bias; // aggregate_bias over records with p_female
};

// One row per method in order of first appearance; means skip missing fields.
std::vector<SummaryRow> summarize(const std::vector<EvalRecord> &records);

} // namespace preadd
