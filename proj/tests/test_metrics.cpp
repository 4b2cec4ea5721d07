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

#include "preadd/cli/dataset.hpp"
#include "preadd/metrics.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace preadd;
using namespace preadd::testing;

TEST_CASE("conditional perplexity") {
    SUBCASE("bigram hand count") {
        const auto be = abab_bigram();
        const double ppl = conditional_perplexity(*be, be->tokenize("a"), be->tokenize("b a"));
        CHECK(ppl == doctest::Approx(oracle()["ppl_a_ba"].get<double>()).epsilon(1e-12));
        CHECK(std::abs(ppl - std::sqrt(2.0)) < 1e-9);
    }
    SUBCASE("uniform unigram gives the support size") {
        auto model = std::make_shared<const NgramModel>(train_ngram_from_lines({"a b c d e"}, 1));
        NgramBackend be(model);
        CHECK(conditional_perplexity(be, be.tokenize("a"), be.tokenize("c e b")) == doctest::Approx(5.0));
    }
    SUBCASE("single token") {
        const auto be = abab_bigram();
        CHECK(conditional_perplexity(*be, be->tokenize("b"), be->tokenize("a")) == doctest::Approx(1.5));
    }
    SUBCASE("empty continuation") {
        const auto be = abab_bigram();
        CHECK(error_kind_of([&] { conditional_perplexity(*be, be->tokenize("a"), Context()); }) ==
              ErrorKind::EmptyInput);
    }
}

TEST_CASE("relevance") {
    TfidfEmbedder emb{CorpusStats({"a b", "b c"})};
    CHECK(relevance(emb, "a b", "a b") == doctest::Approx(1.0));
    CHECK(relevance(emb, "a b", "b c") == doctest::Approx(oracle()["tfidf_cos_ab_bc"].get<double>()).epsilon(1e-12));
    TfidfEmbedder disjoint{CorpusStats({"a b", "c d"})};
    CHECK(relevance(disjoint, "a b", "c d") == 0.0);
}

TEST_CASE("pronoun bias") {
    // vocab: <unk> she her hers he him his other
    std::vector<double> p{0.0, .1, .05, .05, .3, .2, .1, .2};
    std::vector<double> lp;
    for (double x : p) {
        lp.push_back(x > 0 ? std::log(x) : kNegInf);
    }
    const PronounIds ids{{1, 2, 3}, {4, 5, 6}};
    const auto b = pronoun_bias(LogProbVector(lp), ids);
    CHECK(b.p_female == doctest::Approx(oracle()["pronoun_bias"]["p_female"].get<double>()));
    CHECK(b.bias == doctest::Approx(oracle()["pronoun_bias"]["bias"].get<double>()));

    SUBCASE("only the ratio matters") {
        auto shifted = p;
        shifted[7] = 5.0;
        std::vector<double> lp2;
        for (double x : shifted) {
            lp2.push_back(x > 0 ? std::log(x) : kNegInf);
        }
        CHECK(pronoun_bias(renormalize(lp2), ids).p_female == doctest::Approx(0.25));
    }
    SUBCASE("symmetric and extreme cases") {
        CHECK(pronoun_bias(from_probs({.25, .25, .25, .25}), PronounIds{{1}, {2}}).bias == doctest::Approx(0.0));
        const auto one_hot = LogProbVector(std::vector<double>{kNegInf, 0.0, kNegInf});
        const auto r = pronoun_bias(one_hot, PronounIds{{1}, {2}});
        CHECK(r.p_female == doctest::Approx(1.0));
        CHECK(r.bias == doctest::Approx(0.5));
        const auto none = LogProbVector(std::vector<double>{0.0, kNegInf, kNegInf});
        CHECK(error_kind_of([&] { pronoun_bias(none, PronounIds{{1}, {2}}); }) == ErrorKind::ZeroPronounMass);
    }
    SUBCASE("resolution through a backend") {
        auto model = std::make_shared<const NgramModel>(
            train_ngram_from_lines({"she her hers he him his"}, 1));
        NgramBackend be(model);
        const auto r = resolve_pronouns(be, PronounSets{});
        CHECK(r.female.size() == 3);
        CHECK(r.male.size() == 3);
        auto missing = std::make_shared<const NgramModel>(train_ngram_from_lines({"she her he him his"}, 1));
        CHECK(error_kind_of([&] { resolve_pronouns(NgramBackend(missing), PronounSets{}); }) ==
              ErrorKind::PronounUnresolved);
    }
}

TEST_CASE("aggregate bias reproduces the reference table") {
    const auto table = cli::load_pfemale_table(fixture("bias/table8_pfemale.csv"));
    const std::map<std::string, double> reference{
        {"raw", 0.201}, {"prompt", 0.254}, {"fudge", 0.201}, {"preadd-s", 0.157}};
    REQUIRE(table.size() == 4);
    for (const auto &[method, rows] : table) {
        CHECK(rows.size() == 40);
        const auto agg = aggregate_bias(rows);
        CHECK(std::abs(agg.overall - reference.at(method)) <= 0.001);
    }

    SUBCASE("order and duplication invariance") {
        auto rows = table.front().second;
        const double want = aggregate_bias(rows).overall;
        std::mt19937 gen(3);
        std::shuffle(rows.begin(), rows.end(), gen);
        CHECK(aggregate_bias(rows).overall == doctest::Approx(want).epsilon(1e-12));
        rows.push_back(rows.front());
        rows.push_back(rows.front());
        CHECK(aggregate_bias(rows).overall == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("balanced input") {
        CHECK(aggregate_bias({{"x", 0.5}, {"y", 0.5}}).overall == 0.0);
        CHECK(error_kind_of([] { aggregate_bias({}); }) == ErrorKind::EmptyInput);
    }
}

TEST_CASE("success rate") {
    const auto &o = oracle()["lexicon_success"];
    LexiconClassifier lex({"good"}, {"bad"});
    const auto conts = o["continuations"].get<std::vector<std::string>>();
    CHECK(success_rate(lex, conts, Sentiment::Positive) == doctest::Approx(o["rate"].get<double>()));

    class Constant final : public SentimentClassifier {
    public:
        Sentiment classify(std::string_view) const override {
            return Sentiment::Positive;
        }
    } constant;
    CHECK(success_rate(constant, conts, Sentiment::Positive) == 1.0);
    CHECK(success_rate(constant, conts, Sentiment::Negative) == 0.0);
}

TEST_CASE("summarize") {
    std::vector<EvalRecord> recs(3);
    recs[0].method = "raw";
    recs[0].toxicity = 0.2;
    recs[1].method = "preadd-s";
    recs[1].toxicity = 0.1;
    recs[2].method = "raw";
    recs[2].toxicity = 0.4;
    recs[2].fluency_ppl = 12.0;
    const auto rows = summarize(recs);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == "raw");
    CHECK(rows[0].records == 2);
    CHECK(rows[0].toxicity.mean == doctest::Approx(0.3));
    CHECK(rows[0].fluency.count == 1);
    CHECK(rows[0].fluency.missing == 1);
    CHECK(rows[1].toxicity.mean == doctest::Approx(0.1));
    CHECK_FALSE(rows[1].success.present());
    CHECK_FALSE(rows[0].bias.has_value());
}
