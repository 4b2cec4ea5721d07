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

#include "preadd/metrics.hpp"

#include "preadd/error.hpp"
#include "preadd/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace preadd {

double conditional_perplexity(const Backend &evaluator, const Context &prompt, const Context &continuation) {
    if (continuation.empty()) {
        throw Error(ErrorKind::EmptyInput, "continuation is empty");
    }
    Context ctx = prompt;
    double total = 0.0;
    for (TokenId t : continuation.tokens) {
        const LogProbVector lp = evaluator.query(ctx);
        if (t >= lp.size()) {
            throw Error(ErrorKind::TokenOutOfRange, "continuation token outside evaluator vocabulary");
        }
        total += lp[t];
        ctx.push_back(t);
    }
    return std::exp(-total / static_cast<double>(continuation.size()));
}

double relevance(const Embedder &embedder, std::string_view prompt, std::string_view continuation) {
    return cosine_similarity(embedder.embed(prompt), embedder.embed(continuation));
}

ScoreResult toxicity_score(ScorerClient &client, std::string_view text) {
    return client.score(text);
}

void PronounSets::validate() const {
    if (female.empty() || male.empty()) {
        throw Error(ErrorKind::ConfigError, "pronoun sets must be non-empty");
    }
    for (const auto &f : female) {
        if (std::find(male.begin(), male.end(), f) != male.end()) {
            throw Error(ErrorKind::ConfigError, "pronoun '" + f + "' appears in both sets");
        }
    }
}

namespace {

std::vector<TokenId> resolve_set(const Backend &backend, const std::vector<std::string> &forms) {
    const bool has_unk = backend.descriptor().kind == BackendKind::Ngram;
    std::set<TokenId> ids;
    for (const auto &form : forms) {
        bool resolved = false;
        for (const std::string &surface : {form, " " + form}) {
            const Context c = backend.tokenize(surface);
            if (c.empty() || (has_unk && c.tokens.front() == Vocabulary::kUnk)) {
                continue;
            }
            ids.insert(c.tokens.front());
            resolved = true;
        }
        if (!resolved) {
            throw Error(ErrorKind::PronounUnresolved, "pronoun '" + form + "' has no token in the backend vocabulary");
        }
    }
    return {ids.begin(), ids.end()};
}

} // namespace

PronounIds resolve_pronouns(const Backend &backend, const PronounSets &sets) {
    sets.validate();
    return {resolve_set(backend, sets.female), resolve_set(backend, sets.male)};
}

PronounBias pronoun_bias(const LogProbVector &dist, const PronounIds &ids) {
    auto mass = [&](const std::vector<TokenId> &set) {
        double m = 0.0;
        for (TokenId t : set) {
            if (t >= dist.size()) {
                throw Error(ErrorKind::TokenOutOfRange, "pronoun token outside distribution");
            }
            m += dist.prob(t);
        }
        return m;
    };
    const double f = mass(ids.female);
    const double m = mass(ids.male);
    if (!(f + m > 0.0)) {
        throw Error(ErrorKind::ZeroPronounMass, "no probability mass on any pronoun");
    }
    PronounBias r;
    r.p_female = f / (f + m);
    r.bias = std::abs(0.5 - r.p_female);
    return r;
}

PronounBias pronoun_bias(const LogProbVector &dist, const Backend &backend, const PronounSets &sets) {
    return pronoun_bias(dist, resolve_pronouns(backend, sets));
}

BiasAggregate aggregate_bias(const std::vector<std::pair<std::string, double>> &records) {
    if (records.empty()) {
        throw Error(ErrorKind::EmptyInput, "no bias records to aggregate");
    }
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto &[occupation, p] : records) {
        if (occupation.empty()) {
            throw Error(ErrorKind::SchemaError, "bias record without an occupation");
        }
        auto &slot = acc[occupation];
        slot.first += p;
        ++slot.second;
    }
    BiasAggregate out;
    double total = 0.0;
    for (const auto &[occupation, sum_count] : acc) {
        const double mean = sum_count.first / static_cast<double>(sum_count.second);
        out.per_occupation[occupation] = mean;
        total += std::abs(0.5 - mean);
    }
    out.overall = total / static_cast<double>(acc.size());
    return out;
}

double success_rate(const SentimentClassifier &classifier, const std::vector<std::string> &continuations,
                    Sentiment target) {
    if (continuations.empty()) {
        throw Error(ErrorKind::EmptyInput, "no continuations to classify");
    }
    std::size_t hits = 0;
    for (const auto &c : continuations) {
        hits += classifier.classify(c) == target ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(continuations.size());
}

namespace {

template <typename T>
void accumulate(MetricMean &m, const std::optional<T> &v) {
    if (!v) {
        ++m.missing;
        return;
    }
    m.mean += static_cast<double>(*v);
    ++m.count;
}

void finish(MetricMean &m) {
    if (m.count > 0) {
        m.mean /= static_cast<double>(m.count);
    }
}

} // namespace

std::vector<SummaryRow> summarize(const std::vector<EvalRecord> &records) {
    std::vector<SummaryRow> rows;
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::vector<std::pair<std::string, double>>> bias_inputs;
    for (const auto &r : records) {
        auto [it, inserted] = index.emplace(r.method, rows.size());
        if (inserted) {
            rows.push_back(SummaryRow{});
            rows.back().method = r.method;
        }
        SummaryRow &row = rows[it->second];
        ++row.records;
        accumulate(row.toxicity, r.toxicity);
        accumulate(row.full_toxicity, r.full_toxicity);
        accumulate(row.fluency, r.fluency_ppl);
        accumulate(row.relevance, r.relevance);
        std::optional<double> success;
        if (r.success) {
            success = *r.success ? 1.0 : 0.0;
        }
        accumulate(row.success, success);
        accumulate(row.attribute_mass, r.attribute_mass);
        if (r.p_female) {
            bias_inputs[r.method].emplace_back(r.occupation.value_or(r.prompt_id), *r.p_female);
        }
    }
    for (auto &row : rows) {
        finish(row.toxicity);
        finish(row.full_toxicity);
        finish(row.fluency);
        finish(row.relevance);
        finish(row.success);
        finish(row.attribute_mass);
        auto it = bias_inputs.find(row.method);
        if (it != bias_inputs.end()) {
            row.bias = aggregate_bias(it->second).overall;
        }
    }
    return rows;
}

} // namespace preadd
