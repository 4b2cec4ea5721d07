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

#include "test_support.hpp"

#include <doctest.h>

#include <chrono>
#include <filesystem>

using namespace preadd;
using namespace preadd::testing;

namespace {

std::shared_ptr<WordListScorer> bad_words() {
    return std::make_shared<WordListScorer>(std::set<std::string>{"bad"});
}

class FailingScorer final : public AttributeScorer {
public:
    double score(std::string_view) const override {
        throw Error(ErrorKind::BackendError, "provider down");
    }
};

} // namespace

TEST_CASE("word list scorer") {
    WordListScorer s({"bad"});
    CHECK(s.score("bad bad ok") == doctest::Approx(2.0 / 3.0));
    CHECK(s.score("Bad, BAD! ok") == doctest::Approx(2.0 / 3.0));
    CHECK(s.score("fine") == 0.0);
    CHECK(plain_words("\"Hello,\" she said.") == std::vector<std::string>{"hello", "she", "said"});
}

TEST_CASE("scorer client") {
    ScorerClient client(bad_words());
    SUBCASE("empty text is skipped") {
        const auto r = client.score("");
        CHECK(r.skipped);
        CHECK(r.score == 0.0);
        CHECK(client.provider_calls() == 0);
    }
    SUBCASE("cached text never reaches the provider again") {
        const auto first = client.score("bad bad ok");
        const auto second = client.score("bad bad ok");
        CHECK(first.score == second.score);
        CHECK_FALSE(first.cached);
        CHECK(second.cached);
        CHECK(client.provider_calls() == 1);
        CHECK(client.cache_size() == 1);
    }
    SUBCASE("cache persistence") {
        const auto path = (std::filesystem::temp_directory_path() / "preadd_scorer_cache.jsonl").string();
        client.score("bad ok");
        client.score("ok ok");
        client.save_cache(path);
        ScorerClient fresh(std::make_shared<FailingScorer>());
        fresh.load_cache(path);
        CHECK(fresh.score("bad ok").score == doctest::Approx(0.5));
        CHECK(fresh.score("ok ok").cached);
        CHECK(fresh.provider_calls() == 0);
        std::filesystem::remove(path);
    }
    SUBCASE("provider failures") {
        ScorerClient broken(std::make_shared<FailingScorer>());
        CHECK(error_kind_of([&] { broken.score("x"); }) == ErrorKind::ScorerUnavailable);
    }
}

TEST_CASE("content hash") {
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("a") != content_hash("b"));
}

TEST_CASE("token bucket paces requests") {
    TokenBucket bucket(50.0, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 6; ++i) {
        bucket.acquire();
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(elapsed >= 0.09); // five refills at 20 ms each

    TokenBucket off(0.0, 1.0);
    const auto t1 = std::chrono::steady_clock::now();
    for (int i = 0; i < 1000; ++i) {
        off.acquire();
    }
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count() < 0.05);
}

TEST_CASE("lexicon classifier") {
    LexiconClassifier c({"good"}, {"bad"});
    CHECK(c.classify("good good bad") == Sentiment::Positive);
    CHECK(c.classify("bad film") == Sentiment::Negative);
    CHECK(c.classify("good bad") == Sentiment::Neutral);
    CHECK(parse_sentiment("positive") == Sentiment::Positive);
    CHECK(std::string(to_string(Sentiment::Negative)) == "negative");
}
