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

// Attribute scorers (toxicity and the like) and sentiment classifiers.
//
// External scoring services are slow, rate limited and cost money, so every
// scorer sits behind a ScorerClient that paces requests with a token bucket
// and remembers answers by content hash.

#include "preadd/http.hpp"

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace preadd {

class AttributeScorer {
public:
    virtual ~AttributeScorer() = default;
    // Probability in [0, 1] that text carries the attribute.
    virtual double score(std::string_view text) const = 0;
};

// Fraction of words found in a word list. Words are lowercased and stripped of
// surrounding punctuation.
class WordListScorer final : public AttributeScorer {
public:
    explicit WordListScorer(std::set<std::string> words);
    double score(std::string_view text) const override;

private:
    std::set<std::string> words_;
};

// Lowercased whitespace words with leading/trailing punctuation removed.
std::vector<std::string> plain_words(std::string_view text);

// Environment variable holding the scorer credential.
inline constexpr const char *kScorerKeyEnv = "PREADD_SCORER_KEY";

// POST <url> {"text": str} -> {"score": float}, authenticated with
// "Authorization: Bearer $PREADD_SCORER_KEY" when the variable is set.
class RemoteScorer final : public AttributeScorer {
public:
    RemoteScorer(std::string url, std::optional<std::string> api_key, RetryPolicy policy = {});
    static std::unique_ptr<RemoteScorer> from_env(std::string url, RetryPolicy policy = {});
    double score(std::string_view text) const override;

private:
    std::string path_;
    JsonHttpClient client_;
};

// Blocking token bucket; rate <= 0 disables pacing.
class TokenBucket {
public:
    TokenBucket(double rate_per_sec, double burst);
    void acquire();

private:
    using Clock = std::chrono::steady_clock;
    std::mutex mu_;
    double rate_;
    double burst_;
    double tokens_;
    Clock::time_point last_;
};

// Lowercase hex FNV-1a 64 of the UTF-8 bytes; the cache key.
std::string content_hash(std::string_view text);

struct ScoreResult {
    double score = 0.0;
    bool skipped = false; // empty input, provider not called
    bool cached = false;
};

class ScorerClient {
public:
    explicit ScorerClient(std::shared_ptr<const AttributeScorer> provider, double requests_per_sec = 0.0,
                          int rate_limit_retries = 3);

    // Empty text is skipped. Cached text never reaches the provider. Provider
    // failures surface as ScorerUnavailable; RateLimited is retried a few times.
    ScoreResult score(std::string_view text);

    // JSONL {"hash": str, "score": float}
    void load_cache(const std::string &path);
    void save_cache(const std::string &path) const;

    std::size_t provider_calls() const noexcept {
        return calls_.load();
    }
    std::size_t cache_size() const;

private:
    std::shared_ptr<const AttributeScorer> provider_;
    TokenBucket bucket_;
    int rate_limit_retries_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, double> cache_;
    std::atomic<std::size_t> calls_{0};
};

enum class Sentiment { Negative, Neutral, Positive };

const char *to_string(Sentiment s);
Sentiment parse_sentiment(std::string_view s);

class SentimentClassifier {
public:
    virtual ~SentimentClassifier() = default;
    virtual Sentiment classify(std::string_view text) const = 0;
};

// Positive when more positive than negative lexicon words, negative when fewer, else neutral.
class LexiconClassifier final : public SentimentClassifier {
public:
    LexiconClassifier(std::set<std::string> positive, std::set<std::string> negative);
    Sentiment classify(std::string_view text) const override;

private:
    std::set<std::string> positive_;
    std::set<std::string> negative_;
};

// Uses /v1/classify with the attribute read as "positive sentiment".
class RemoteClassifier final : public SentimentClassifier {
public:
    explicit RemoteClassifier(std::string base_url, RetryPolicy policy = {});
    Sentiment classify(std::string_view text) const override;

private:
    JsonHttpClient client_;
};

} // namespace preadd
