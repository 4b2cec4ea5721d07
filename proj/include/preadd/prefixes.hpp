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
#include "preadd/http.hpp"
#include "preadd/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace preadd {

// Default control prefixes.
namespace prefix_text {
inline constexpr const char *kToxicity = "The following text perpetuates negative stereotypes, is threatening or "
                                         "sexually explicit, or contains profane language.";
inline constexpr const char *kToxicityNegPrompt =
    "The following text does not perpetuate negative stereotypes, is not threatening or sexually explicit, and "
    "does not contain profane language.";
inline constexpr const char *kGenderBias = "The following text exhibits gender stereotypes.";
inline constexpr const char *kGenderBiasNegPrompt = "The following text does not exhibit gender stereotypes.";
inline constexpr const char *kPositiveSentiment =
    "The following text exhibits a very positive sentiment and/or opinion.";
inline constexpr const char *kNegativeSentiment =
    "The following text exhibits a very negative sentiment and/or opinion.";
} // namespace prefix_text

struct ContextPair {
    Context raw;
    Context prefixed;
};

// raw = tokenize(prompt), prefixed = tokenize(prefix + separator + prompt).
// If the tokenizer merges tokens across the boundary, prefixed is rebuilt as
// tokenize(prefix + separator) followed by raw so that raw stays a suffix.
ContextPair build_contexts(const Backend &backend, std::string_view prefix, std::string_view prompt,
                           std::string_view separator = " ");

struct EmbeddingVector {
    std::vector<double> values;
    double norm = 0.0; // 0 flags an empty/zero embedding

    static EmbeddingVector from_values(std::vector<double> values);
};

// 0 when either vector has zero norm.
double cosine_similarity(const EmbeddingVector &u, const EmbeddingVector &v);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
};

// Lowercased runs of letters, digits and apostrophes.
std::vector<std::string> analyze_terms(std::string_view text);

// Document frequencies over a fixed corpus.
class CorpusStats {
public:
    explicit CorpusStats(const std::vector<std::string> &documents);

    std::size_t num_documents() const noexcept {
        return num_docs_;
    }
    std::size_t num_terms() const noexcept {
        return terms_.size();
    }
    std::optional<std::size_t> term_index(const std::string &term) const;
    // ln((1 + N) / (1 + df)) + 1
    double idf(std::size_t term_index) const;

private:
    std::size_t num_docs_ = 0;
    std::map<std::string, std::size_t> terms_; // term -> index
    std::vector<std::size_t> df_;
};

// Raw term count times smoothed idf, over the corpus vocabulary; unknown terms are dropped.
EmbeddingVector tfidf_embed(std::string_view text, const CorpusStats &stats);

class TfidfEmbedder final : public Embedder {
public:
    explicit TfidfEmbedder(CorpusStats stats) : stats_(std::move(stats)) {}
    EmbeddingVector embed(std::string_view text) const override {
        return tfidf_embed(text, stats_);
    }
    const CorpusStats &stats() const noexcept {
        return stats_;
    }

private:
    CorpusStats stats_;
};

// POST /v1/embed {"text": str} -> {"embedding":[float,...]}
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(std::string base_url, RetryPolicy policy = {});
    EmbeddingVector embed(std::string_view text) const override;

private:
    JsonHttpClient client_;
};

enum class PrefixMode { Static, Dynamic };

struct PrefixSpec {
    PrefixMode mode = PrefixMode::Static;
    std::optional<std::string> static_text;
    std::vector<std::string> bank;

    void validate() const;
};

struct DynamicPrefix {
    std::string prefix;
    double score = 0.0;
    std::size_t index = 0;
    bool leaked = false; // the selected member is the prompt itself
};

// Bank member with the highest cosine similarity to the prompt; ties go to the
// lowest index. Throws EmptyBank.
DynamicPrefix select_dynamic_prefix(std::string_view prompt, const std::vector<std::string> &bank,
                                    const Embedder &embedder);

struct BankEntry {
    std::string text;
    std::optional<double> score;
};

// Plain text (one prefix per line) or JSONL {"text": str, "score": float}.
std::vector<BankEntry> load_prefix_bank(const std::string &path);

} // namespace preadd
