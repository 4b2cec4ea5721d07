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

#include "preadd/scoring.hpp"

#include "preadd/error.hpp"
#include "preadd/ngram.hpp"
#include "preadd/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

namespace preadd {

std::vector<std::string> plain_words(std::string_view text) {
    std::vector<std::string> out;
    for (auto &w : split_whitespace(text)) {
        std::size_t lo = 0;
        std::size_t hi = w.size();
        while (lo < hi && std::ispunct(static_cast<unsigned char>(w[lo]))) {
            ++lo;
        }
        while (hi > lo && std::ispunct(static_cast<unsigned char>(w[hi - 1]))) {
            --hi;
        }
        if (hi == lo) {
            continue;
        }
        std::string word = w.substr(lo, hi - lo);
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        out.push_back(std::move(word));
    }
    return out;
}

WordListScorer::WordListScorer(std::set<std::string> words) : words_(std::move(words)) {}

double WordListScorer::score(std::string_view text) const {
    const auto words = plain_words(text);
    if (words.empty()) {
        return 0.0;
    }
    std::size_t hits = 0;
    for (const auto &w : words) {
        hits += words_.count(w);
    }
    return static_cast<double>(hits) / static_cast<double>(words.size());
}

namespace {

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string &url) {
    const auto scheme = url.find("://");
    const auto start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto slash = url.find('/', start);
    if (slash == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, slash), url.substr(slash)};
}

std::vector<std::pair<std::string, std::string>> auth_headers(const std::optional<std::string> &key) {
    if (!key || key->empty()) {
        return {};
    }
    return {{"Authorization", "Bearer " + *key}};
}

} // namespace

RemoteScorer::RemoteScorer(std::string url, std::optional<std::string> api_key, RetryPolicy policy)
    : path_(split_url(url).second), client_(split_url(url).first, policy, auth_headers(api_key)) {}

std::unique_ptr<RemoteScorer> RemoteScorer::from_env(std::string url, RetryPolicy policy) {
    std::optional<std::string> key;
    if (const char *k = std::getenv(kScorerKeyEnv)) {
        key = k;
    }
    return std::make_unique<RemoteScorer>(std::move(url), std::move(key), policy);
}

double RemoteScorer::score(std::string_view text) const {
    const nlohmann::json res = client_.post(path_, {{"text", std::string(text)}});
    if (!res.contains("score") || !res["score"].is_number()) {
        throw Error(ErrorKind::ScorerUnavailable, "scorer response lacks a numeric score");
    }
    const double s = res["score"].get<double>();
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(ErrorKind::ScorerUnavailable, "scorer returned " + std::to_string(s) + " outside [0, 1]");
    }
    return s;
}

TokenBucket::TokenBucket(double rate_per_sec, double burst)
    : rate_(rate_per_sec), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(Clock::now()) {}

void TokenBucket::acquire() {
    if (rate_ <= 0.0) {
        return;
    }
    for (;;) {
        std::chrono::duration<double> wait{0.0};
        {
            std::lock_guard<std::mutex> lock(mu_);
            const auto now = Clock::now();
            tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
            last_ = now;
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        }
        std::this_thread::sleep_for(wait);
    }
}

std::string content_hash(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

ScorerClient::ScorerClient(std::shared_ptr<const AttributeScorer> provider, double requests_per_sec,
                           int rate_limit_retries)
    : provider_(std::move(provider)), bucket_(requests_per_sec, 1.0), rate_limit_retries_(rate_limit_retries) {
    if (!provider_) {
        throw Error(ErrorKind::MissingMetricBackend, "scorer client has no provider");
    }
}

ScoreResult ScorerClient::score(std::string_view text) {
    ScoreResult r;
    if (text.empty()) {
        r.skipped = true;
        return r;
    }
    const std::string key = content_hash(text);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            r.score = it->second;
            r.cached = true;
            return r;
        }
    }
    for (int attempt = 0;; ++attempt) {
        bucket_.acquire();
        try {
            ++calls_;
            r.score = provider_->score(text);
            break;
        } catch (const Error &e) {
            if (e.kind() == ErrorKind::RateLimited && attempt < rate_limit_retries_) {
                std::this_thread::sleep_for(std::chrono::milliseconds(100) * (1 << attempt));
                continue;
            }
            if (e.kind() == ErrorKind::RateLimited) {
                throw;
            }
            throw Error(ErrorKind::ScorerUnavailable, e.what());
        }
    }
    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(key, r.score);
    return r;
}

void ScorerClient::load_cache(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        return;
    }
    std::string line;
    std::size_t lineno = 0;
    std::lock_guard<std::mutex> lock(mu_);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            cache_[j.at("hash").get<std::string>()] = j.at("score").get<double>();
        } catch (const nlohmann::json::exception &e) {
            throw Error(ErrorKind::SchemaError, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void ScorerClient::save_cache(const std::string &path) const {
    std::map<std::string, double> sorted;
    {
        std::lock_guard<std::mutex> lock(mu_);
        sorted.insert(cache_.begin(), cache_.end());
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::IoError, "cannot write cache " + path);
    }
    for (const auto &[hash, score] : sorted) {
        out << dump_json({{"hash", hash}, {"score", score}}) << '\n';
    }
}

std::size_t ScorerClient::cache_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
}

const char *to_string(Sentiment s) {
    switch (s) {
    case Sentiment::Negative: return "negative";
    case Sentiment::Neutral: return "neutral";
    case Sentiment::Positive: return "positive";
    }
    return "neutral";
}

Sentiment parse_sentiment(std::string_view s) {
    if (s == "positive" || s == "pos") {
        return Sentiment::Positive;
    }
    if (s == "negative" || s == "neg") {
        return Sentiment::Negative;
    }
    if (s == "neutral") {
        return Sentiment::Neutral;
    }
    throw Error(ErrorKind::ConfigError, "unknown sentiment '" + std::string(s) + "'");
}

LexiconClassifier::LexiconClassifier(std::set<std::string> positive, std::set<std::string> negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {}

Sentiment LexiconClassifier::classify(std::string_view text) const {
    long balance = 0;
    for (const auto &w : plain_words(text)) {
        balance += static_cast<long>(positive_.count(w));
        balance -= static_cast<long>(negative_.count(w));
    }
    if (balance > 0) {
        return Sentiment::Positive;
    }
    return balance < 0 ? Sentiment::Negative : Sentiment::Neutral;
}

RemoteClassifier::RemoteClassifier(std::string base_url, RetryPolicy policy) : client_(std::move(base_url), policy) {}

Sentiment RemoteClassifier::classify(std::string_view text) const {
    nlohmann::json res;
    try {
        res = client_.post("/v1/classify", {{"text", std::string(text)}});
    } catch (const Error &e) {
        throw Error(ErrorKind::ClassifierUnavailable, e.what());
    }
    if (!res.contains("logprob_attribute") || !res["logprob_attribute"].is_number()) {
        throw Error(ErrorKind::ClassifierUnavailable, "response lacks logprob_attribute");
    }
    const double lp = res["logprob_attribute"].get<double>();
    const double half = std::log(0.5);
    if (lp > half) {
        return Sentiment::Positive;
    }
    return lp < half ? Sentiment::Negative : Sentiment::Neutral;
}

} // namespace preadd
