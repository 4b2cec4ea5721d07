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

#include "preadd/kernels.hpp"
#include "preadd/ngram.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace preadd;
using namespace preadd::testing;

TEST_CASE("unigram on a a a b") {
    auto model = std::make_shared<const NgramModel>(train_ngram_from_lines({"a a a b"}, 1, 1.0));
    NgramBackend be(model);
    const auto lp = be.next_token_logprobs(be.tokenize("b"));
    CHECK(lp.size() == 3);
    CHECK(lp[Vocabulary::kUnk] == kNegInf);
    CHECK(lp.prob(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(lp.prob(2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // order 1 ignores the context entirely
    CHECK(be.next_token_logprobs(be.tokenize("a a")) == lp);
}

TEST_CASE("bigram on a b a b") {
    const auto be = abab_bigram();
    const auto &m = be->model();
    const TokenId a = m.vocab().id("a");
    const TokenId b = m.vocab().id("b");
    REQUIRE(a == 1);
    REQUIRE(b == 2);

    SUBCASE("counts") {
        const auto &t = m.table(1);
        CHECK(t.size() == 2);
        CHECK(t.at({a}).next == std::map<TokenId, std::uint64_t>{{b, 2}});
        CHECK(t.at({b}).next == std::map<TokenId, std::uint64_t>{{a, 1}});
    }
    SUBCASE("probabilities are exact hand counts") {
        const auto after_a = be->next_token_logprobs(Context({a}));
        CHECK(after_a.prob(b) == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(after_a.prob(a) == doctest::Approx(0.25).epsilon(1e-15));
        const auto after_b = be->next_token_logprobs(Context({b}));
        CHECK(after_b.prob(a) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(after_b.prob(b) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    SUBCASE("unseen context falls back to the unigram exactly") {
        auto uni = std::make_shared<const NgramModel>(train_ngram_from_lines({"a b a b"}, 1, 1.0));
        const auto want = NgramBackend(uni).next_token_logprobs(Context({a}));
        CHECK(be->next_token_logprobs(Context({Vocabulary::kUnk})) == want);
        CHECK(be->next_token_logprobs(Context()) == want);
    }
    SUBCASE("normalized and deterministic") {
        for (auto ctx : {Context({a}), Context({b}), Context({a, b, a})}) {
            const auto lp = be->next_token_logprobs(ctx);
            CHECK(kernels::logsumexp(lp.view()) == doctest::Approx(0.0).epsilon(1e-9));
            CHECK(be->next_token_logprobs(ctx) == lp);
        }
    }
    SUBCASE("out of range tokens") {
        CHECK(error_kind_of([&] { be->next_token_logprobs(Context({7})); }) == ErrorKind::TokenOutOfRange);
    }
}

TEST_CASE("tokenize and detokenize") {
    const auto be = abab_bigram();
    CHECK(be->tokenize("a b").tokens == std::vector<TokenId>{1, 2});
    CHECK(be->tokenize("a z").tokens == std::vector<TokenId>{1, 0});
    const std::vector<TokenId> ids{1, 2};
    CHECK(be->detokenize(ids) == "a b");
    CHECK(be->detokenize(be->tokenize("b a  b").tokens) == "b a b");
    CHECK(be->descriptor().vocab.front() == "<unk>");
}

TEST_CASE("training errors") {
    CHECK(error_kind_of([] { train_ngram_from_lines({}, 2); }) == ErrorKind::EmptyCorpus);
    CHECK(error_kind_of([] { train_ngram_from_lines({"   "}, 2); }) == ErrorKind::EmptyCorpus);
}

TEST_CASE("higher order backoff") {
    const auto model = std::make_shared<const NgramModel>(train_ngram_from_lines({"x y z", "w y q"}, 3, 0.5));
    NgramBackend be(model);
    const auto &v = model->vocab();
    // (x y) was seen, so z dominates; (q y) was not, so the bigram row for y applies.
    const auto seen = be.next_token_logprobs(be.tokenize("x y"));
    CHECK(seen.prob(v.id("z")) > seen.prob(v.id("q")));
    const auto backoff = be.next_token_logprobs(be.tokenize("q y"));
    const auto bigram_row = NgramBackend(std::make_shared<const NgramModel>(
                                             train_ngram_from_lines({"x y z", "w y q"}, 2, 0.5)))
                                .next_token_logprobs(be.tokenize("y"));
    CHECK(backoff == bigram_row);
}
