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

#include "preadd/decoding.hpp"

#include "preadd/error.hpp"
#include "preadd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace preadd {

void ControlConfig::validate() const {
    if (max_tokens == 0) {
        throw Error(ErrorKind::ConfigError, "max_tokens must be >= 1");
    }
    if (top_k && *top_k == 0) {
        throw Error(ErrorKind::InvalidK, "top_k must be >= 1");
    }
    if (top_p && !(*top_p > 0.0 && *top_p <= 1.0)) {
        throw Error(ErrorKind::InvalidP, "top_p must lie in (0, 1]");
    }
}

namespace {

void renormalize_in_place(std::vector<double> &v) {
    double lse = kernels::logsumexp(v);
    if (!std::isfinite(lse)) {
        throw Error(ErrorKind::DegenerateDistribution, "no finite mass left to normalize");
    }
    kernels::subtract(v, lse);
    kernels::clamp_floor(v, kLogProbFloor);
    lse = kernels::logsumexp(v);
    kernels::subtract(v, lse);
    // The second shift is O(V * exp(floor)); keep entries on the floor.
    kernels::clamp_floor(v, kLogProbFloor);
}

} // namespace

LogProbVector normalize(std::span<const double> raw_logits) {
    if (raw_logits.empty()) {
        throw Error(ErrorKind::EmptyVector, "cannot normalize an empty vector");
    }
    bool any_finite = false;
    for (double v : raw_logits) {
        if (std::isnan(v) || v == -kNegInf) {
            throw Error(ErrorKind::DegenerateDistribution, "logits contain NaN or +inf");
        }
        any_finite = any_finite || std::isfinite(v);
    }
    if (!any_finite) {
        throw Error(ErrorKind::AllInfinite, "every logit is -inf");
    }
    std::vector<double> v(raw_logits.begin(), raw_logits.end());
    const double lse = kernels::logsumexp(v);
    kernels::subtract(v, lse);
    for (double &x : v) {
        if (x < kLogProbFloor) {
            x = kLogProbFloor;
        }
    }
    const double lse2 = kernels::logsumexp(v);
    kernels::subtract(v, lse2);
    kernels::clamp_floor(v, kLogProbFloor);
    return LogProbVector(std::move(v));
}

LogProbVector renormalize(std::vector<double> values) {
    if (values.empty()) {
        throw Error(ErrorKind::EmptyVector, "cannot normalize an empty vector");
    }
    for (double v : values) {
        if (std::isnan(v) || v == -kNegInf) {
            throw Error(ErrorKind::DegenerateDistribution, "values contain NaN or +inf");
        }
    }
    renormalize_in_place(values);
    return LogProbVector(std::move(values));
}

LogProbVector combine(const LogProbVector &base, const LogProbVector &prefixed, double alpha) {
    if (base.size() != prefixed.size()) {
        throw Error(ErrorKind::LengthMismatch,
                    "base has " + std::to_string(base.size()) + " entries, prefixed " + std::to_string(prefixed.size()));
    }
    if (base.size() == 0) {
        throw Error(ErrorKind::EmptyVector, "cannot combine empty distributions");
    }
    if (alpha == 0.0) {
        return base;
    }
    if (alpha == 1.0) {
        return prefixed;
    }
    std::vector<double> out(base.size());
    kernels::affine_combine(base.view(), prefixed.view(), alpha, out);
    renormalize_in_place(out);
    return LogProbVector(std::move(out));
}

LogProbVector restrict_to(const LogProbVector &dist, const std::vector<bool> &mask) {
    if (mask.size() != dist.size()) {
        throw Error(ErrorKind::LengthMismatch, "mask and distribution differ in length");
    }
    std::vector<double> v = dist.values;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!mask[i]) {
            v[i] = kNegInf;
        }
    }
    renormalize_in_place(v);
    return LogProbVector(std::move(v));
}

Truncation truncate(const LogProbVector &dist, std::optional<std::size_t> top_k, std::optional<double> top_p) {
    const std::size_t n = dist.size();
    if (top_k && (*top_k < 1 || *top_k > n)) {
        throw Error(ErrorKind::InvalidK, "top_k=" + std::to_string(*top_k) + " outside [1, " + std::to_string(n) + "]");
    }
    if (top_p && !(*top_p > 0.0 && *top_p <= 1.0)) {
        throw Error(ErrorKind::InvalidP, "top_p=" + std::to_string(*top_p) + " outside (0, 1]");
    }

    Truncation out;
    if (!top_k && !top_p) {
        out.mask.assign(n, true);
        out.renormalized = dist;
        out.kept = n;
        return out;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return dist.values[a] > dist.values[b]; });

    std::size_t finite = 0;
    for (double v : dist.values) {
        finite += std::isfinite(v) ? 1 : 0;
    }
    std::size_t keep = finite;
    if (top_k) {
        keep = std::min(keep, *top_k);
    }
    if (top_p) {
        // Tolerance absorbs rounding in exp(); 0.5 + 0.3 must reach 0.8.
        constexpr double kSlack = 1e-12;
        double cumulative = 0.0;
        std::size_t nucleus = 0;
        while (nucleus < finite) {
            cumulative += dist.prob(order[nucleus]);
            ++nucleus;
            if (cumulative >= *top_p - kSlack) {
                break;
            }
        }
        keep = std::min(keep, nucleus);
    }
    keep = std::max<std::size_t>(keep, 1);

    out.mask.assign(n, false);
    for (std::size_t r = 0; r < keep; ++r) {
        out.mask[order[r]] = true;
    }
    out.kept = keep;
    out.renormalized = restrict_to(dist, out.mask);
    return out;
}

TokenId sample_token(const LogProbVector &dist, CounterRng &rng) {
    if (dist.size() == 0) {
        throw Error(ErrorKind::EmptyVector, "cannot sample from an empty distribution");
    }
    double total = 0.0;
    std::size_t last_live = dist.size();
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (std::isfinite(dist.values[i])) {
            total += std::exp(dist.values[i]);
            last_live = i;
        }
    }
    if (last_live == dist.size() || !(total > 0.0)) {
        throw Error(ErrorKind::DegenerateDistribution, "distribution has no mass to sample");
    }
    const double target = rng.next_unit() * total;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (!std::isfinite(dist.values[i])) {
            continue;
        }
        cumulative += std::exp(dist.values[i]);
        if (cumulative > target) {
            return static_cast<TokenId>(i);
        }
    }
    return static_cast<TokenId>(last_live);
}

LogProbVector control_step(const LogProbVector &base, const LogProbVector &prefixed, const ControlConfig &cfg) {
    if (!cfg.truncation_enabled()) {
        return combine(base, prefixed, cfg.alpha);
    }
    if (cfg.truncate_before_control) {
        Truncation t = truncate(base, cfg.top_k, cfg.top_p);
        if (cfg.alpha == 0.0) {
            return std::move(t.renormalized);
        }
        return combine(t.renormalized, restrict_to(prefixed, t.mask), cfg.alpha);
    }
    return truncate(combine(base, prefixed, cfg.alpha), cfg.top_k, cfg.top_p).renormalized;
}

DecodeResult decode(const Backend &backend, Context raw, Context prefixed, const ControlConfig &cfg,
                    CounterRng &rng, bool keep_trace) {
    cfg.validate();
    if (!prefixed.ends_with(raw)) {
        throw Error(ErrorKind::ContextMismatch, "prefixed context does not end with the raw context");
    }
    const auto eos = backend.descriptor().eos_token;

    DecodeResult result;
    result.tokens.reserve(cfg.max_tokens);
    result.trace.reserve(cfg.max_tokens);
    for (std::size_t step = 0; step < cfg.max_tokens; ++step) {
        LogProbVector base = backend.query(raw);
        LogProbVector pre = backend.query(prefixed);
        if (base.size() != pre.size()) {
            throw Error(ErrorKind::BackendError, "backend returned vectors of different lengths");
        }
        LogProbVector combined = control_step(base, pre, cfg);
        const TokenId token = sample_token(combined, rng);

        result.tokens.push_back(token);
        DecodeStep rec;
        rec.token = token;
        if (keep_trace) {
            rec.base = std::move(base);
            rec.prefixed = std::move(pre);
            rec.combined = std::move(combined);
        }
        result.trace.push_back(std::move(rec));

        raw.push_back(token);
        prefixed.push_back(token);
        if (eos && token == *eos) {
            result.stopped_at_eos = true;
            break;
        }
    }
    return result;
}

DecodeResult decode(const Backend &backend, Context raw, Context prefixed, const ControlConfig &cfg) {
    CounterRng rng(cfg.seed);
    return decode(backend, std::move(raw), std::move(prefixed), cfg, rng);
}

} // namespace preadd
