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
#include "preadd/prefixes.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace preadd;
using namespace preadd::testing;

namespace {

// Scores a context by its last token.
class LastTokenDiscriminator final : public Discriminator {
public:
    explicit LastTokenDiscriminator(std::function<double(TokenId)> fn) : fn_(std::move(fn)) {}
    double logprob_attribute(const Context &text) const override {
        return fn_(text.tokens.empty() ? 0 : text.tokens.back());
    }

private:
    std::function<double(TokenId)> fn_;
};

} // namespace

TEST_CASE("raw decode") {
    const auto be = abab_bigram();
    ControlConfig cfg;
    cfg.max_tokens = 4;
    cfg.seed = 42;

    SUBCASE("matches core decode at alpha 0") {
        CounterRng r1(42), r2(42);
        const auto raw = raw_decode(*be, "a", cfg, r1);
        cfg.alpha = 0.0;
        const auto core = decode(*be, Context({1}), Context({2, 1}), cfg, r2);
        CHECK(raw.tokens == core.tokens);
        REQUIRE(raw.trace.size() == core.trace.size());
        for (std::size_t i = 0; i < raw.trace.size(); ++i) {
            CHECK(raw.trace[i].combined == core.trace[i].combined);
        }
    }
    SUBCASE("golden sequence for seed 42") {
        CounterRng rng(42);
        const auto r = raw_decode(*be, "a", cfg, rng);
        CHECK(be->detokenize(r.tokens) == "b a b a");
        CounterRng again(42);
        CHECK(raw_decode(*be, "a", cfg, again).tokens == r.tokens);
    }
}

TEST_CASE("instruction prompting equals alpha 1") {
    auto model = std::make_shared<const NgramModel>(
        train_ngram_from_lines({"be kind a b a", "b a b b a", "kind words b a b"}, 3, 0.5));
    NgramBackend be(model);
    ControlConfig cfg;
    cfg.max_tokens = 6;
    CounterRng r1(9), r2(9);
    const auto prompted = instruction_prompt_decode(be, "be kind", "a b", cfg, r1);
    cfg.alpha = 1.0;
    const auto ctx = build_contexts(be, "be kind", "a b");
    const auto core = decode(be, ctx.raw, ctx.prefixed, cfg, r2);
    CHECK(prompted.tokens == core.tokens);
    REQUIRE(prompted.trace.size() == core.trace.size());
    for (std::size_t i = 0; i < core.trace.size(); ++i) {
        CHECK(prompted.trace[i].combined == core.trace[i].combined);
    }
}

TEST_CASE("fudge_step") {
    SUBCASE("uniform base reweighted by the discriminator") {
        const auto base = from_probs({.5, .5});
        LastTokenDiscriminator disc([](TokenId t) { return std::log(t == 0 ? .9 : .1); });
        const auto out = fudge_step(base, disc, Context({1}), 2);
        CHECK(out.prob(0) == doctest::Approx(.9).epsilon(1e-12));
        CHECK(out.prob(1) == doctest::Approx(.1).epsilon(1e-12));
    }
    SUBCASE("constant discriminator equals truncation") {
        const auto base = from_probs({.4, .3, .2, .1});
        LastTokenDiscriminator disc([](TokenId) { return std::log(.3); });
        const auto out = fudge_step(base, disc, Context(), 2);
        const auto want = truncate(base, 2, std::nullopt).renormalized;
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(out[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
        CHECK(want[3] == kNegInf);
        CHECK(out[3] == kNegInf);
        CHECK(out[2] == kNegInf);
    }
    SUBCASE("indicator discriminator") {
        const auto base = from_probs({.25, .25, .25, .25});
        LastTokenDiscriminator disc([](TokenId t) { return t == 0 ? 0.0 : kLogProbFloor; });
        const auto out = fudge_step(base, disc, Context(), 4);
        CHECK(out.prob(0) > 1.0 - 1e-12);
    }
    SUBCASE("invalid k") {
        LastTokenDiscriminator disc([](TokenId) { return 0.0; });
        CHECK(error_kind_of([&] { fudge_step(from_probs({.5, .5}), disc, Context(), 0); }) == ErrorKind::InvalidK);
    }
}

TEST_CASE("naive Bayes discriminator") {
    Vocabulary vocab;
    vocab.add("x");
    vocab.add("y");
    const auto x = vocab.id("x");
    const auto y = vocab.id("y");

    const auto nb = train_nb_discriminator(std::vector<std::string>{"x x"}, std::vector<std::string>{"y y"}, 1, vocab);
    CHECK(std::exp(nb.logprob_attribute(Context({x}))) == doctest::Approx(oracle()["nb_x"].get<double>()).epsilon(1e-12));
    CHECK(std::exp(nb.logprob_attribute(Context({Vocabulary::kUnk}))) == doctest::Approx(0.5).epsilon(1e-12));

    const auto same = train_nb_discriminator(std::vector<std::string>{"x y"}, std::vector<std::string>{"x y"}, 1, vocab);
    for (auto ctx : {Context({x}), Context({y, y}), Context()}) {
        CHECK(std::exp(same.logprob_attribute(ctx)) == doctest::Approx(0.5).epsilon(1e-12));
    }

    const auto swapped = train_nb_discriminator(std::vector<std::string>{"y y"}, std::vector<std::string>{"x x"}, 1, vocab);
    for (auto ctx : {Context({x}), Context({y}), Context({x, y, x})}) {
        const double p = std::exp(nb.logprob_attribute(ctx));
        const double q = std::exp(swapped.logprob_attribute(ctx));
        CHECK(p + q == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(nb.logprob_attribute(ctx) <= 0.0);
        CHECK(nb.logprob_attribute(ctx) >= kLogProbFloor);
    }
}

TEST_CASE("fudge decode steers toward the attribute") {
    const auto be = abab_bigram();
    LastTokenDiscriminator disc([](TokenId t) { return t == 2 ? 0.0 : kLogProbFloor; });
    ControlConfig cfg;
    cfg.max_tokens = 5;
    CounterRng rng(1);
    const auto r = fudge_decode(*be, Context({1}), disc, cfg, rng);
    for (TokenId t : r.tokens) {
        CHECK(t == 2);
    }
}
