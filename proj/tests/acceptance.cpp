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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include "preadd/baselines.hpp"
#include "preadd/cli/config.hpp"
#include "preadd/cli/dataset.hpp"
#include "preadd/cli/runner.hpp"
#include "preadd/decoding.hpp"
#include "preadd/metrics.hpp"
#include "preadd/ngram.hpp"
#include "preadd/prefixes.hpp"
#include "preadd/stats.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace preadd;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fixture(const std::string &rel) {
    return std::string(PREADD_FIXTURES) + "/" + rel;
}

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Normalized random distribution; logits uniform in [-spread, spread].
LogProbVector random_dist(CounterRng &rng, std::size_t n, double spread) {
    std::vector<double> v(n);
    for (auto &x : v) {
        x = spread * (2.0 * rng.next_unit() - 1.0);
    }
    return normalize(v);
}

std::size_t random_size(CounterRng &rng) {
    return 2 + static_cast<std::size_t>(rng.next_u64() % 511); // 2..512
}

bool touches_floor(const LogProbVector &d) {
    for (double v : d.values) {
        if (v <= kLogProbFloor) {
            return true;
        }
    }
    return false;
}

Outcome endpoint_identities() {
    CounterRng rng(1);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = random_size(rng);
        const auto base = random_dist(rng, n, 8.0);
        const auto pre = random_dist(rng, n, 8.0);
        const auto at0 = combine(base, pre, 0.0);
        const auto at1 = combine(base, pre, 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            worst = std::max({worst, std::abs(at0[j] - base[j]), std::abs(at1[j] - pre[j])});
        }
    }
    return {worst <= 1e-9, "1000 pairs, max |diff| " + fmt("%.3g", worst)};
}

Outcome power_form_oracle() {
    CounterRng rng(2);
    const double alphas[] = {-5, -1, -0.5, 0.5, 2, 5};
    double worst = 0.0;
    int compared = 0;
    int clamped = 0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = random_size(rng);
        const auto base = random_dist(rng, n, 3.0);
        const auto pre = random_dist(rng, n, 3.0);
        for (double a : alphas) {
            const auto got = combine(base, pre, a);
            // Plain probability space in extended precision.
            std::vector<long double> w(n);
            long double z = 0.0L;
            for (std::size_t j = 0; j < n; ++j) {
                const long double pb = std::exp(static_cast<long double>(base[j]));
                const long double pp = std::exp(static_cast<long double>(pre[j]));
                w[j] = std::pow(pp, static_cast<long double>(a)) * std::pow(pb, 1.0L - static_cast<long double>(a));
                z += w[j];
            }
            bool floor_hit = false;
            for (std::size_t j = 0; j < n; ++j) {
                floor_hit = floor_hit || std::log(w[j] / z) <= static_cast<long double>(kLogProbFloor);
            }
            if (floor_hit) {
                ++clamped;
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                const double want = static_cast<double>(w[j] / z);
                worst = std::max(worst, std::abs(got.prob(j) - want));
            }
            ++compared;
        }
    }
    return {worst <= 1e-7 && compared > 0, std::to_string(compared) + " (pair, alpha) cases, " + std::to_string(clamped) +
                                               " skipped for clamping, max |diff| " + fmt("%.3g", worst)};
}

Outcome monotonicity() {
    CounterRng rng(3);
    const double grid[] = {-3, -2, -1, 0, 1, 2, 3};
    int violations = 0;
    int floored = 0;
    int pairs = 0;
    while (pairs < 500) {
        const std::size_t n = random_size(rng);
        // Kept narrow so the probability floor never engages on this grid.
        const auto base = random_dist(rng, n, 1.5);
        const auto pre = random_dist(rng, n, 1.5);
        std::size_t star = 0;
        double dmin = INFINITY, dmax = -INFINITY;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = pre[j] - base[j];
            if (d > pre[star] - base[star]) {
                star = j;
            }
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        if (dmax - dmin < 1e-12) {
            continue;
        }
        ++pairs;
        double prev = -INFINITY;
        for (double a : grid) {
            const auto out = combine(base, pre, a);
            floored += touches_floor(out) ? 1 : 0;
            if (!(out[star] > prev)) {
                ++violations;
            }
            prev = out[star];
        }
    }
    return {violations == 0, "500 pairs, " + std::to_string(violations) + " violations, " + std::to_string(floored) +
                                 " outputs on the floor"};
}

Outcome bias_table() {
    const std::map<std::string, double> reference{
        {"raw", 0.201}, {"prompt", 0.254}, {"fudge", 0.201}, {"preadd-s", 0.157}};
    bool ok = true;
    std::string detail;
    const auto table = cli::load_pfemale_table(fixture("bias/table8_pfemale.csv"));
    for (const auto &[method, rows] : table) {
        const double got = aggregate_bias(rows).overall;
        const auto it = reference.find(method);
        ok = ok && it != reference.end() && std::abs(got - it->second) <= 0.001;
        detail += (detail.empty() ? "" : ", ") + method + " " + fmt("%.4f", got);
    }
    return {ok && table.size() == reference.size(), detail};
}

std::vector<bool> mask_for(const NgramBackend &be, const std::string &words_file) {
    std::vector<bool> mask(be.vocab_size(), false);
    for (const auto &w : cli::read_word_set(words_file)) {
        if (be.model().vocab().contains(w)) {
            mask[be.model().vocab().id(w)] = true;
        }
    }
    return mask;
}

double mean_step_mass(const DecodeResult &r, const std::vector<bool> &mask) {
    double total = 0.0;
    for (const auto &st : r.trace) {
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (mask[i]) {
                total += st.combined.prob(i);
            }
        }
    }
    return total / static_cast<double>(r.trace.size());
}

// Mean over decodes of the mean per-step attribute mass of the sampling distribution.
double attribute_mass(const NgramBackend &be, const std::vector<bool> &mask,
                      const std::vector<std::pair<Context, Context>> &contexts, double alpha, std::size_t steps) {
    double sum = 0.0;
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        ControlConfig cfg;
        cfg.alpha = alpha;
        cfg.max_tokens = steps;
        CounterRng rng(1000 + i);
        sum += mean_step_mass(decode(be, contexts[i].first, contexts[i].second, cfg, rng), mask);
    }
    return sum / static_cast<double>(contexts.size());
}

Outcome directional_control() {
    // (a) Bigram LM, unconditional: only the first step sees the prefix, since both
    // contexts end in the same token afterwards.
    auto bigram = std::make_shared<const NgramModel>(
        train_ngram_from_lines(cli::read_lines(fixture("toy/bigram_corpus.txt")), 2, 1.0));
    NgramBackend bg(bigram);
    const auto bg_mask = mask_for(bg, fixture("toy/bigram_attribute_words.txt"));
    std::vector<std::pair<Context, Context>> bg_ctx(100, {Context(), bg.tokenize("angry rude")});
    const double b_m1 = attribute_mass(bg, bg_mask, bg_ctx, -1.0, 1);
    const double b_0 = attribute_mass(bg, bg_mask, bg_ctx, 0.0, 1);
    const double b_2 = attribute_mass(bg, bg_mask, bg_ctx, 2.0, 1);

    // (b) Order-5 LM with real prompts, four sampled steps.
    auto toy = std::make_shared<const NgramModel>(
        train_ngram_from_lines(cli::read_lines(fixture("toy/corpus.txt")), 5, 0.1));
    NgramBackend tb(toy, toy->vocab().id("."));
    const auto tb_mask = mask_for(tb, fixture("toy/attribute_words.txt"));
    const auto prompts = cli::ingest_dataset(fixture("toy/sweep_prompts.jsonl"), cli::Task::Freeform).records;
    std::vector<std::pair<Context, Context>> tb_ctx;
    for (int i = 0; i < 100; ++i) {
        const auto c = build_contexts(tb, "angry rude talk", prompts[i % prompts.size()].prompt);
        tb_ctx.emplace_back(c.raw, c.prefixed);
    }
    const double t_m1 = attribute_mass(tb, tb_mask, tb_ctx, -1.0, 4);
    const double t_0 = attribute_mass(tb, tb_mask, tb_ctx, 0.0, 4);
    const double t_2 = attribute_mass(tb, tb_mask, tb_ctx, 2.0, 4);

    const bool ok = b_m1 < b_0 && b_0 < b_2 && t_m1 < t_0 && t_0 < t_2;
    return {ok, "bigram mass " + fmt("%.4f", b_m1) + " < " + fmt("%.4f", b_0) + " < " + fmt("%.4f", b_2) +
                    "; order-5 prompted " + fmt("%.4f", t_m1) + " < " + fmt("%.4f", t_0) + " < " + fmt("%.4f", t_2)};
}

bool same_trace(const DecodeResult &x, const DecodeResult &y) {
    if (x.tokens != y.tokens || x.trace.size() != y.trace.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.trace.size(); ++i) {
        if (!(x.trace[i].combined == y.trace[i].combined)) {
            return false;
        }
    }
    return true;
}

Outcome baseline_equivalence() {
    auto toy = std::make_shared<const NgramModel>(
        train_ngram_from_lines(cli::read_lines(fixture("toy/corpus.txt")), 5, 0.1));
    NgramBackend be(toy, toy->vocab().id("."));
    const auto prompts = cli::ingest_dataset(fixture("toy/prompts.jsonl"), cli::Task::Toxicity).records;
    const std::string prefix = "kind gentle speech";
    int mismatches = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto &prompt = prompts[seed % prompts.size()].prompt;
        const auto ctx = build_contexts(be, prefix, prompt);
        ControlConfig cfg;
        cfg.max_tokens = 8;

        CounterRng r1(seed), r2(seed);
        const auto prompted = instruction_prompt_decode(be, prefix, prompt, cfg, r1);
        cfg.alpha = 1.0;
        mismatches += same_trace(prompted, decode(be, ctx.raw, ctx.prefixed, cfg, r2)) ? 0 : 1;

        CounterRng r3(seed), r4(seed);
        const auto raw = raw_decode(be, prompt, cfg, r3);
        cfg.alpha = 0.0;
        mismatches += same_trace(raw, decode(be, ctx.raw, ctx.prefixed, cfg, r4)) ? 0 : 1;
    }
    return {mismatches == 0, "20 seeds x 2 baselines, " + std::to_string(mismatches) + " trace mismatches"};
}

Outcome ngram_oracle() {
    auto model = std::make_shared<const NgramModel>(train_ngram_from_lines({"a b a b"}, 2, 1.0));
    NgramBackend be(model);
    const TokenId a = model->vocab().id("a");
    const TokenId b = model->vocab().id("b");
    const std::vector<TokenId> ca{a}, cb{b};
    const bool counts = model->probability(ca, b) == 0.75 && model->probability(cb, a) == 2.0 / 3.0;
    const double ppl = conditional_perplexity(be, be.tokenize("a"), be.tokenize("b a"));
    const double err = std::abs(ppl - std::sqrt(2.0));
    return {counts && err <= 1e-9, std::string("P(b|a)=") + fmt("%.17g", model->probability(ca, b)) +
                                       " P(a|b)=" + fmt("%.17g", model->probability(cb, a)) + " ppl err " +
                                       fmt("%.2g", err)};
}

Outcome stats_oracle() {
    std::ifstream in(fixture("oracles/ttest_pairs.json"));
    const auto pairs = nlohmann::json::parse(in);
    double dt = 0.0, dp = 0.0, anti = 0.0;
    for (const auto &c : pairs) {
        const auto a = c["a"].get<std::vector<double>>();
        const auto b = c["b"].get<std::vector<double>>();
        const auto ab = stats::paired_t_test(a, b);
        const auto ba = stats::paired_t_test(b, a);
        dt = std::max(dt, std::abs(ab.t - c["t"].get<double>()));
        dp = std::max(dp, std::abs(ab.p_two_sided - c["p"].get<double>()));
        anti = std::max({anti, std::abs(ab.t + ba.t), std::abs(ab.p_two_sided - ba.p_two_sided)});
    }
    return {pairs.size() == 25 && dt <= 1e-6 && dp <= 1e-6 && anti <= 1e-12,
            std::to_string(pairs.size()) + " pairs, max |dt| " + fmt("%.2g", dt) + ", max |dp| " + fmt("%.2g", dp) +
                ", antisymmetry " + fmt("%.2g", anti)};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch() {
    const auto dir = fs::temp_directory_path() / "preadd_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Outcome determinism() {
    const auto dir = scratch();
    std::ostringstream log;
    auto cfg = cli::RunConfig::load(fixture("toy/toxicity.json"));
    cfg.out = dir.string();
    cfg.run_id = "first";
    cli::cmd_bench(cfg, log);
    cfg.run_id = "second";
    cli::cmd_bench(cfg, log);
    bool same = true;
    std::size_t bytes = 0;
    for (const char *f : {"generations.jsonl", "metrics.csv"}) {
        const auto x = slurp(dir / "first" / f);
        const auto y = slurp(dir / "second" / f);
        same = same && !x.empty() && x == y;
        bytes += x.size();
    }
    fs::remove_all(dir);
    return {same, std::to_string(bytes) + " bytes compared"};
}

Outcome ablation_shape() {
    const auto dir = scratch();
    std::ostringstream log;
    auto cfg = cli::RunConfig::load(fixture("toy/ablate.json"));
    cfg.out = dir.string();
    cfg.run_id = "ablate";
    const auto rows = cli::cmd_ablate(cfg, {-0.5, -1.0, -1.5, -2.0}, log);
    bool monotone = rows.size() == 4 && fs::exists(dir / "ablate" / "ablation.csv");
    std::string detail = "attribute mass";
    double prev = INFINITY;
    for (const auto &r : rows) {
        const double m = r.summary.attribute_mass.mean;
        monotone = monotone && r.summary.attribute_mass.present() && m <= prev;
        prev = m;
        detail += " " + fmt("%.4f", m);
    }
    fs::remove_all(dir);
    return {monotone, detail};
}

struct Criterion {
    int id;
    const char *name;
    double budget_s; // 0 = no stated bound
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "endpoint identities", 5, endpoint_identities},
        {2, "power-form oracle", 5, power_form_oracle},
        {3, "monotonicity in alpha", 0, monotonicity},
        {4, "bias aggregation matches the reference table", 1, bias_table},
        {5, "directional control on toy n-gram models", 30, directional_control},
        {6, "baseline equivalence", 0, baseline_equivalence},
        {7, "n-gram oracle", 0, ngram_oracle},
        {8, "statistics oracle", 0, stats_oracle},
        {9, "bench determinism", 0, determinism},
        {10, "ablation shape", 60, ablation_shape},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.budget_s <= 0 || secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s %2d %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
