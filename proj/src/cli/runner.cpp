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

#include "preadd/cli/runner.hpp"

#include "preadd/error.hpp"
#include "preadd/ngram.hpp"
#include "preadd/remote.hpp"
#include "preadd/stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace preadd::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::IoError, "cannot write " + path.string());
    }
    out << content;
    if (!out) {
        throw Error(ErrorKind::IoError, "write failed for " + path.string());
    }
}

fs::path make_run_dir(const RunConfig &cfg) {
    const fs::path dir = fs::path(cfg.out) / cfg.resolved_run_id();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
    }
    return dir;
}

void write_config(const fs::path &dir, const RunConfig &cfg) {
    write_file(dir / "config.json", cfg.to_json().dump(2) + "\n");
}

// Runs fn(i) for i in [0, n) on `workers` threads (0 = OpenMP default). The first
// failure by index is rethrown after the join so error reporting is deterministic.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn &&fn) {
    std::vector<std::exception_ptr> errors(n);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::shared_ptr<const Backend> build_backend(const ServiceSpec &spec, const char *role) {
    if (spec.kind == "remote") {
        if (spec.url.empty()) {
            throw Error(ErrorKind::ConfigError, std::string(role) + ": remote backend needs a url");
        }
        return std::make_shared<RemoteBackend>(spec.url);
    }
    if (spec.kind == "ngram") {
        if (spec.corpus.empty()) {
            throw Error(ErrorKind::ConfigError, std::string(role) + ": ngram backend needs a corpus");
        }
        auto model = std::make_shared<const NgramModel>(
            train_ngram_from_lines(read_lines(spec.corpus), spec.order, spec.smoothing));
        std::optional<TokenId> eos;
        if (spec.eos) {
            if (!model->vocab().contains(*spec.eos)) {
                throw Error(ErrorKind::ConfigError, std::string(role) + ": eos '" + *spec.eos + "' not in corpus");
            }
            eos = model->vocab().id(*spec.eos);
        }
        return std::make_shared<NgramBackend>(model, eos, std::string("ngram-") + std::to_string(spec.order));
    }
    throw Error(ErrorKind::ConfigError, std::string(role) + ": unknown backend kind '" + spec.kind + "'");
}

std::vector<bool> attribute_mask(const Backend &backend, const std::set<std::string> &words) {
    std::vector<bool> mask(backend.vocab_size(), false);
    const auto &vocab = backend.descriptor().vocab;
    if (!vocab.empty()) {
        for (std::size_t i = 0; i < vocab.size(); ++i) {
            if (words.count(vocab[i])) {
                mask[i] = true;
            }
        }
        return mask;
    }
    for (const auto &w : words) {
        const Context c = backend.tokenize(w);
        if (c.size() == 1 && c.tokens[0] < mask.size()) {
            mask[c.tokens[0]] = true;
        }
    }
    return mask;
}

double mass_on(const LogProbVector &dist, const std::vector<bool> &mask) {
    double m = 0.0;
    for (std::size_t i = 0; i < dist.size() && i < mask.size(); ++i) {
        if (mask[i]) {
            m += dist.prob(i);
        }
    }
    return m;
}

std::string safe_name(const std::string &id) {
    std::string out = id;
    for (char &c : out) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        if (!ok) {
            c = '_';
        }
    }
    return out;
}

void write_trace(const fs::path &path, const DecodeResult &r) {
    std::string body;
    for (std::size_t s = 0; s < r.trace.size(); ++s) {
        const DecodeStep &st = r.trace[s];
        const TokenId t = st.token;
        auto lp = [t](const LogProbVector &v) -> nlohmann::json {
            if (t >= v.size() || !std::isfinite(v[t])) {
                return nullptr;
            }
            return v[t];
        };
        nlohmann::json j = {{"step", s},
                            {"token", t},
                            {"base_logprob", lp(st.base)},
                            {"prefixed_logprob", lp(st.prefixed)},
                            {"combined_logprob", lp(st.combined)}};
        body += dump_json(j) + "\n";
    }
    write_file(path, body);
}

bool needs_bank(const std::vector<Method> &methods) {
    return std::find(methods.begin(), methods.end(), Method::PreaddDynamic) != methods.end();
}

struct Prepared {
    Services services;
    IngestResult data;
    std::vector<std::string> bank;
};

Prepared prepare(const RunConfig &cfg, const std::vector<Method> &methods, std::ostream &log) {
    Prepared p;
    p.data = ingest_dataset(cfg.prompts, cfg.task);
    for (const auto &s : p.data.skipped) {
        log << "skip row " << s.row << " (" << s.id << "): " << s.reason << "\n";
    }
    if (p.data.records.empty()) {
        throw Error(ErrorKind::EmptyInput, cfg.prompts + ": no usable prompts");
    }
    p.services = build_services(cfg);
    if (needs_bank(methods)) {
        const auto entries = load_prefix_bank(cfg.prefix_bank);
        check_bank_overlap(entries, p.data.records);
        for (const auto &e : entries) {
            p.bank.push_back(e.text);
        }
        if (!p.services.embedder) {
            p.services.embedder = std::make_shared<TfidfEmbedder>(CorpusStats(p.bank));
        }
    }
    return p;
}

void require_metric_backends(const RunConfig &cfg, const Services &s) {
    if (cfg.task == Task::Toxicity && !s.scorer) {
        throw Error(ErrorKind::MissingMetricBackend, "toxicity benchmarks need a scorer");
    }
    if (cfg.task == Task::Sentiment && !s.classifier) {
        throw Error(ErrorKind::MissingMetricBackend, "sentiment benchmarks need a classifier");
    }
    if (cfg.task == Task::Freeform && s.attribute_mask.empty()) {
        throw Error(ErrorKind::MissingMetricBackend, "freeform benchmarks need attribute_words");
    }
}

std::string join_text(const std::string &a, const std::string &b) {
    if (a.empty()) {
        return b;
    }
    if (b.empty()) {
        return a;
    }
    return a + " " + b;
}

EvalRecord evaluate(const RunConfig &cfg, const Services &s, const PromptRecord &prompt, const Generation &g) {
    EvalRecord r;
    r.prompt_id = g.id;
    r.method = to_string(g.method);
    r.continuation = g.continuation;
    r.occupation = prompt.occupation;
    r.p_female = g.p_female;
    r.attribute_mass = g.attribute_mass;
    if (cfg.task == Task::Bias) {
        return r;
    }
    if (s.scorer && cfg.task == Task::Toxicity) {
        const ScoreResult sr = toxicity_score(*s.scorer, g.continuation);
        if (!sr.skipped) {
            r.toxicity = sr.score;
        }
        if (cfg.full_utterance_toxicity) {
            const ScoreResult fr = toxicity_score(*s.scorer, join_text(prompt.prompt, g.continuation));
            if (!fr.skipped) {
                r.full_toxicity = fr.score;
            }
        }
    }
    if (s.evaluator && !g.continuation.empty()) {
        const Context cont = s.evaluator->tokenize(g.continuation);
        if (!cont.empty()) {
            r.fluency_ppl = conditional_perplexity(*s.evaluator, s.evaluator->tokenize(prompt.prompt), cont);
        }
    }
    if (s.embedder) {
        const std::string other = cfg.relevance_full_text ? join_text(prompt.prompt, g.continuation) : g.continuation;
        r.relevance = relevance(*s.embedder, prompt.prompt, other);
    }
    if (s.classifier && cfg.task == Task::Sentiment) {
        r.success = s.classifier->classify(g.continuation) == parse_sentiment(cfg.target_sentiment);
    }
    return r;
}

std::vector<EvalRecord> evaluate_all(const RunConfig &cfg, const Services &s,
                                     const std::vector<PromptRecord> &prompts,
                                     const std::vector<Generation> &gens) {
    std::map<std::string, const PromptRecord *> by_id;
    for (const auto &p : prompts) {
        by_id[p.id] = &p;
    }
    std::vector<EvalRecord> out(gens.size());
    parallel_for(gens.size(), cfg.workers, [&](std::size_t i) { out[i] = evaluate(cfg, s, *by_id.at(gens[i].id), gens[i]); });
    return out;
}

nlohmann::json opt_json(const std::optional<double> &v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json record_to_json(const EvalRecord &r) {
    nlohmann::json j = {{"id", r.prompt_id}, {"method", r.method}, {"continuation", r.continuation}};
    j["occupation"] = r.occupation ? nlohmann::json(*r.occupation) : nlohmann::json(nullptr);
    j["toxicity"] = opt_json(r.toxicity);
    j["full_toxicity"] = opt_json(r.full_toxicity);
    j["fluency_ppl"] = opt_json(r.fluency_ppl);
    j["relevance"] = opt_json(r.relevance);
    j["success"] = r.success ? nlohmann::json(*r.success) : nlohmann::json(nullptr);
    j["p_female"] = opt_json(r.p_female);
    j["attribute_mass"] = opt_json(r.attribute_mass);
    return j;
}

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::optional<double> metric_value(const EvalRecord &r, const std::string &metric) {
    if (metric == "toxicity") {
        return r.toxicity;
    }
    if (metric == "success") {
        if (!r.success) {
            return std::nullopt;
        }
        return *r.success ? 1.0 : 0.0;
    }
    if (metric == "attribute_mass") {
        return r.attribute_mass;
    }
    if (metric == "fluency") {
        return r.fluency_ppl;
    }
    return std::nullopt;
}

std::optional<double> row_value(const SummaryRow &row, const std::string &metric) {
    auto present = [](const MetricMean &m) -> std::optional<double> {
        return m.present() ? std::optional<double>(m.mean) : std::nullopt;
    };
    if (metric == "toxicity") {
        return present(row.toxicity);
    }
    if (metric == "full_toxicity") {
        return present(row.full_toxicity);
    }
    if (metric == "fluency") {
        return present(row.fluency);
    }
    if (metric == "relevance") {
        return present(row.relevance);
    }
    if (metric == "success") {
        return present(row.success);
    }
    if (metric == "attribute_mass") {
        return present(row.attribute_mass);
    }
    if (metric == "bias") {
        return row.bias;
    }
    return std::nullopt;
}

const std::vector<std::string> kCsvColumns = {"toxicity", "full_toxicity", "fluency", "relevance",
                                              "success",  "bias",          "attribute_mass"};

std::string jsonl(const std::vector<nlohmann::json> &rows) {
    std::string out;
    for (const auto &j : rows) {
        out += dump_json(j) + "\n";
    }
    return out;
}

std::vector<std::string> method_names(const std::vector<Method> &methods) {
    std::vector<std::string> out;
    for (Method m : methods) {
        out.emplace_back(to_string(m));
    }
    return out;
}

} // namespace

Services build_services(const RunConfig &cfg) {
    Services s;
    s.generator = build_backend(cfg.generator, "generator");
    if (cfg.evaluator.set()) {
        s.evaluator = build_backend(cfg.evaluator, "evaluator");
    }
    if (cfg.embedder.set()) {
        if (cfg.embedder.kind == "tfidf") {
            if (cfg.embedder.corpus.empty()) {
                throw Error(ErrorKind::ConfigError, "tfidf embedder needs a corpus");
            }
            s.embedder = std::make_shared<TfidfEmbedder>(CorpusStats(read_lines(cfg.embedder.corpus)));
        } else if (cfg.embedder.kind == "remote") {
            s.embedder = std::make_shared<RemoteEmbedder>(cfg.embedder.url);
        } else {
            throw Error(ErrorKind::ConfigError, "embedder kind must be tfidf or remote");
        }
    }
    if (cfg.scorer.set()) {
        std::shared_ptr<const AttributeScorer> provider;
        if (cfg.scorer.kind == "wordlist") {
            provider = std::make_shared<WordListScorer>(read_word_set(cfg.scorer.words));
        } else if (cfg.scorer.kind == "remote") {
            provider = RemoteScorer::from_env(cfg.scorer.url);
        } else {
            throw Error(ErrorKind::ConfigError, "scorer kind must be wordlist or remote");
        }
        s.scorer = std::make_shared<ScorerClient>(provider, cfg.scorer.requests_per_sec);
        if (!cfg.scorer.cache.empty() && fs::exists(cfg.scorer.cache)) {
            s.scorer->load_cache(cfg.scorer.cache);
        }
    }
    if (cfg.classifier.set()) {
        if (cfg.classifier.kind == "lexicon") {
            s.classifier = std::make_shared<LexiconClassifier>(read_word_set(cfg.classifier.positive),
                                                               read_word_set(cfg.classifier.negative));
        } else if (cfg.classifier.kind == "remote") {
            s.classifier = std::make_shared<RemoteClassifier>(cfg.classifier.url);
        } else {
            throw Error(ErrorKind::ConfigError, "classifier kind must be lexicon or remote");
        }
    }
    if (cfg.discriminator.set()) {
        if (cfg.discriminator.kind == "ngram") {
            const auto *gen = dynamic_cast<const NgramBackend *>(s.generator.get());
            if (gen == nullptr) {
                throw Error(ErrorKind::ConfigError, "an ngram discriminator needs an ngram generator vocabulary");
            }
            s.discriminator = std::make_shared<NaiveBayesDiscriminator>(
                train_nb_discriminator(read_lines(cfg.discriminator.attribute_corpus),
                                       read_lines(cfg.discriminator.other_corpus), cfg.discriminator.order,
                                       gen->model().vocab(), cfg.discriminator.smoothing));
        } else if (cfg.discriminator.kind == "remote") {
            s.discriminator = std::make_shared<RemoteDiscriminator>(cfg.discriminator.url, *s.generator);
        } else {
            throw Error(ErrorKind::ConfigError, "discriminator kind must be ngram or remote");
        }
    }
    if (!cfg.attribute_words.empty()) {
        s.attribute_mask = attribute_mask(*s.generator, read_word_set(cfg.attribute_words));
    }
    return s;
}

std::vector<Generation> run_method(const RunConfig &cfg, const Services &services,
                                   const std::vector<PromptRecord> &prompts, Method method, double alpha,
                                   const std::vector<std::string> &bank, const std::string &trace_dir) {
    const Backend &gen = *services.generator;
    const ControlConfig control = cfg.control(alpha);
    const std::string prefix = cfg.effective_prefix();
    const std::string instruction = cfg.effective_instruction_prefix();
    const std::string sep = cfg.effective_separator();
    const bool bias = cfg.task == Task::Bias;
    const bool traced = cfg.write_trace && !trace_dir.empty();
    const bool keep_trace = traced || !services.attribute_mask.empty();

    if (method == Method::Fudge && !services.discriminator) {
        throw Error(ErrorKind::ConfigError, "method fudge needs a discriminator");
    }
    if (method == Method::PreaddDynamic && (bank.empty() || !services.embedder)) {
        throw Error(ErrorKind::EmptyBank, "method preadd-d needs a non-empty prefix bank");
    }

    std::optional<PronounIds> pronouns;
    if (bias) {
        pronouns = resolve_pronouns(gen, PronounSets{});
    }
    if (traced) {
        fs::create_directories(fs::path(trace_dir) / to_string(method));
    }

    std::vector<Generation> out(prompts.size());
    parallel_for(prompts.size(), cfg.workers, [&](std::size_t i) {
        const PromptRecord &p = prompts[i];
        Generation g;
        g.id = p.id;
        g.method = method;
        switch (method) {
        case Method::Raw:
            g.alpha = 0.0;
            break;
        case Method::Prompt:
            g.alpha = 1.0;
            g.prefix_used = instruction;
            break;
        case Method::PreaddStatic:
            g.alpha = alpha;
            g.prefix_used = prefix;
            break;
        case Method::PreaddDynamic:
            g.alpha = alpha;
            g.dynamic = select_dynamic_prefix(p.prompt, bank, *services.embedder);
            g.prefix_used = g.dynamic->prefix;
            break;
        case Method::Fudge:
            break;
        }

        if (bias) {
            // Single next-token distribution at the truncation point, untruncated so the
            // pronoun mass is not cut away.
            const Context raw = gen.tokenize(p.prompt);
            LogProbVector dist;
            if (method == Method::Raw) {
                dist = gen.query(raw);
            } else if (method == Method::Fudge) {
                dist = fudge_step(gen.query(raw), *services.discriminator, raw, cfg.fudge_top_k);
            } else {
                const ContextPair ctx = build_contexts(gen, *g.prefix_used, p.prompt, sep);
                dist = method == Method::Prompt ? gen.query(ctx.prefixed)
                                                : combine(gen.query(ctx.raw), gen.query(ctx.prefixed), alpha);
            }
            g.p_female = pronoun_bias(dist, *pronouns).p_female;
            if (!services.attribute_mask.empty()) {
                g.attribute_mass = mass_on(dist, services.attribute_mask);
            }
            out[i] = std::move(g);
            return;
        }

        CounterRng rng = CounterRng::for_stream(cfg.seed, p.id);
        DecodeResult r;
        switch (method) {
        case Method::Raw:
            r = raw_decode(gen, p.prompt, control, rng);
            break;
        case Method::Prompt:
            r = instruction_prompt_decode(gen, instruction, p.prompt, control, rng, sep);
            break;
        case Method::PreaddStatic:
        case Method::PreaddDynamic: {
            ContextPair ctx = build_contexts(gen, *g.prefix_used, p.prompt, sep);
            r = decode(gen, std::move(ctx.raw), std::move(ctx.prefixed), control, rng, keep_trace);
            break;
        }
        case Method::Fudge:
            r = fudge_decode(gen, gen.tokenize(p.prompt), *services.discriminator, control, rng, cfg.fudge_top_k);
            break;
        }
        g.stopped_at_eos = r.stopped_at_eos;
        g.tokens = r.tokens;
        std::vector<TokenId> text_tokens = r.tokens;
        if (r.stopped_at_eos && !text_tokens.empty()) {
            text_tokens.pop_back();
        }
        g.continuation = gen.detokenize(text_tokens);
        if (!services.attribute_mask.empty() && !r.trace.empty()) {
            double total = 0.0;
            for (const auto &st : r.trace) {
                total += mass_on(st.combined, services.attribute_mask);
            }
            g.attribute_mass = total / static_cast<double>(r.trace.size());
        }
        if (traced) {
            const fs::path rel = fs::path("traces") / to_string(method) / (safe_name(p.id) + ".jsonl");
            write_trace(fs::path(trace_dir).parent_path() / rel, r);
            g.trace_path = rel.generic_string();
        }
        out[i] = std::move(g);
    });
    return out;
}

nlohmann::json generation_to_json(const Generation &g) {
    nlohmann::json j = {{"id", g.id}, {"method", to_string(g.method)}};
    j["alpha"] = opt_json(g.alpha);
    j["prefix_used"] = g.prefix_used ? nlohmann::json(*g.prefix_used) : nlohmann::json(nullptr);
    if (g.dynamic) {
        j["prefix_index"] = g.dynamic->index;
        j["prefix_similarity"] = g.dynamic->score;
        j["prefix_leaked"] = g.dynamic->leaked;
    }
    j["continuation"] = g.continuation;
    j["tokens"] = g.tokens;
    j["stopped_at_eos"] = g.stopped_at_eos;
    if (g.p_female) {
        j["p_female"] = *g.p_female;
    }
    if (g.attribute_mass) {
        j["attribute_mass"] = *g.attribute_mass;
    }
    if (g.trace_path) {
        j["trace"] = *g.trace_path;
    }
    return j;
}

std::string main_metric(Task task) {
    switch (task) {
    case Task::Toxicity:
        return "toxicity";
    case Task::Bias:
        return "bias";
    case Task::Sentiment:
        return "success";
    case Task::Freeform:
        return "attribute_mass";
    }
    return "toxicity";
}

std::string format_metrics_csv(const std::vector<SummaryRow> &rows) {
    std::string out = "method,records";
    for (const auto &c : kCsvColumns) {
        out += "," + c;
    }
    out += "\n";
    for (const auto &row : rows) {
        out += row.method + "," + std::to_string(row.records);
        for (const auto &c : kCsvColumns) {
            const auto v = row_value(row, c);
            out += ",";
            if (v) {
                out += fmt(*v, 6);
            }
        }
        out += "\n";
    }
    return out;
}

std::string format_report_md(Task task, const std::vector<SummaryRow> &rows) {
    static const std::map<std::string, std::string> titles = {
        {"toxicity", "Toxicity"},      {"full_toxicity", "Full-utterance toxicity"},
        {"fluency", "Fluency (ppl)"},  {"relevance", "Relevance"},
        {"success", "Success"},        {"bias", "Bias"},
        {"attribute_mass", "Attribute mass"}};
    std::vector<std::string> cols;
    for (const auto &c : kCsvColumns) {
        for (const auto &row : rows) {
            if (row_value(row, c)) {
                cols.push_back(c);
                break;
            }
        }
    }
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header = {"Method", "N"};
    for (const auto &c : cols) {
        header.push_back(titles.at(c));
    }
    cells.push_back(header);
    bool flagged = false;
    for (const auto &row : rows) {
        std::vector<std::string> line = {row.method, std::to_string(row.records)};
        for (const auto &c : cols) {
            const auto v = row_value(row, c);
            std::string cell = v ? fmt(*v, 3) : "-";
            if (v && c == "fluency" && row.method == to_string(Method::Fudge)) {
                cell += "*";
                flagged = true;
            }
            line.push_back(cell);
        }
        cells.push_back(line);
    }
    std::vector<std::size_t> width(header.size(), 3);
    for (const auto &line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            width[c] = std::max(width[c], line[c].size());
        }
    }
    auto render = [&](const std::vector<std::string> &line) {
        std::string s = "|";
        for (std::size_t c = 0; c < line.size(); ++c) {
            const std::size_t pad = width[c] - line[c].size();
            s += " " + (c == 0 ? line[c] + std::string(pad, ' ') : std::string(pad, ' ') + line[c]) + " |";
        }
        return s + "\n";
    };
    std::string out = "# " + std::string(to_string(task)) + " benchmark\n\n";
    out += render(cells[0]);
    std::string rule = "|";
    for (std::size_t c = 0; c < width.size(); ++c) {
        rule += (c == 0 ? " " + std::string(width[c], '-') + " |" : " " + std::string(width[c] - 1, '-') + ": |");
    }
    out += rule + "\n";
    for (std::size_t r = 1; r < cells.size(); ++r) {
        out += render(cells[r]);
    }
    out += "\nMain metric: " + main_metric(task) + ".\n";
    if (flagged) {
        out += "\n\\* FUDGE fluency is not directly comparable: its discriminator reranks tokens outside the "
               "generator's own distribution.\n";
    }
    return out;
}

nlohmann::json significance_report(Task task, const std::vector<EvalRecord> &records,
                                   const std::vector<std::string> &methods) {
    const std::string metric = main_metric(task);
    // method -> ordered (key, value); keys pair observations across methods.
    std::map<std::string, std::vector<std::pair<std::string, double>>> series;
    if (task == Task::Bias) {
        std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> sums;
        for (const auto &r : records) {
            if (r.p_female) {
                auto &slot = sums[r.method][r.occupation.value_or(r.prompt_id)];
                slot.first += *r.p_female;
                ++slot.second;
            }
        }
        for (const auto &[method, occ] : sums) {
            for (const auto &[name, acc] : occ) {
                series[method].emplace_back(name, std::abs(0.5 - acc.first / static_cast<double>(acc.second)));
            }
        }
    } else {
        for (const auto &r : records) {
            if (const auto v = metric_value(r, metric)) {
                series[r.method].emplace_back(r.prompt_id, *v);
            }
        }
    }

    nlohmann::json comparisons = nlohmann::json::array();
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            std::map<std::string, double> other;
            for (const auto &[k, v] : series[methods[j]]) {
                other[k] = v;
            }
            std::vector<double> a;
            std::vector<double> b;
            for (const auto &[k, v] : series[methods[i]]) {
                auto it = other.find(k);
                if (it != other.end()) {
                    a.push_back(v);
                    b.push_back(it->second);
                }
            }
            nlohmann::json c = {{"a", methods[i]}, {"b", methods[j]}, {"n", a.size()}};
            try {
                const stats::TTestResult t = stats::paired_t_test(a, b);
                c["t"] = t.t;
                c["p"] = t.p_two_sided;
                c["dof"] = t.dof;
            } catch (const Error &e) {
                c["error"] = to_string(e.kind());
                c["message"] = e.what();
            }
            comparisons.push_back(std::move(c));
        }
    }
    return {{"metric", metric}, {"test", "paired t-test, two-sided"}, {"comparisons", comparisons}};
}

namespace {

void log_dynamic_prefixes(const std::vector<Generation> &gens, std::ostream &log) {
    for (const auto &g : gens) {
        if (g.dynamic) {
            log << "prefix " << g.id << ": bank[" << g.dynamic->index << "] sim=" << fmt(g.dynamic->score, 4)
                << (g.dynamic->leaked ? " (prompt is in the bank)" : "") << " \"" << g.dynamic->prefix << "\"\n";
        }
    }
}

} // namespace

RunOutputs cmd_generate(const RunConfig &cfg, std::ostream &log) {
    cfg.validate();
    const std::vector<Method> methods = {cfg.method};
    Prepared p = prepare(cfg, methods, log);
    RunOutputs out;
    const fs::path dir = make_run_dir(cfg);
    out.dir = dir.string();
    write_config(dir, cfg);
    out.generations = run_method(cfg, p.services, p.data.records, cfg.method, cfg.effective_alpha(), p.bank,
                                 (dir / "traces").string());
    log_dynamic_prefixes(out.generations, log);
    std::vector<nlohmann::json> rows;
    for (const auto &g : out.generations) {
        rows.push_back(generation_to_json(g));
    }
    write_file(dir / "generations.jsonl", jsonl(rows));
    log << "wrote " << out.generations.size() << " generations to " << (dir / "generations.jsonl").string() << "\n";
    return out;
}

namespace {

RunOutputs bench_from_table(const RunConfig &cfg, std::ostream &log) {
    RunOutputs out;
    const fs::path dir = make_run_dir(cfg);
    out.dir = dir.string();
    write_config(dir, cfg);
    std::vector<std::string> methods;
    for (const auto &[method, values] : load_pfemale_table(cfg.pfemale_table)) {
        methods.push_back(method);
        for (const auto &[occupation, p] : values) {
            EvalRecord r;
            r.prompt_id = occupation;
            r.method = method;
            r.occupation = occupation;
            r.p_female = p;
            out.records.push_back(std::move(r));
        }
    }
    out.summary = summarize(out.records);
    std::vector<nlohmann::json> rows;
    for (const auto &r : out.records) {
        rows.push_back(record_to_json(r));
    }
    write_file(dir / "records.jsonl", jsonl(rows));
    write_file(dir / "metrics.csv", format_metrics_csv(out.summary));
    write_file(dir / "report.md", format_report_md(cfg.task, out.summary));
    write_file(dir / "significance.json", significance_report(cfg.task, out.records, methods).dump(2) + "\n");
    log << "bias table: " << methods.size() << " methods from " << cfg.pfemale_table << "\n";
    return out;
}

} // namespace

RunOutputs cmd_bench(const RunConfig &cfg, std::ostream &log) {
    cfg.validate();
    if (cfg.task == Task::Bias && !cfg.pfemale_table.empty()) {
        return bench_from_table(cfg, log);
    }
    const std::vector<Method> methods = cfg.effective_methods();
    Prepared p = prepare(cfg, methods, log);
    require_metric_backends(cfg, p.services);

    RunOutputs out;
    const fs::path dir = make_run_dir(cfg);
    out.dir = dir.string();
    write_config(dir, cfg);
    for (Method m : methods) {
        auto gens =
            run_method(cfg, p.services, p.data.records, m, cfg.effective_alpha(), p.bank, (dir / "traces").string());
        log << to_string(m) << ": " << gens.size() << " prompts\n";
        log_dynamic_prefixes(gens, log);
        out.generations.insert(out.generations.end(), std::make_move_iterator(gens.begin()),
                               std::make_move_iterator(gens.end()));
    }
    out.records = evaluate_all(cfg, p.services, p.data.records, out.generations);
    out.summary = summarize(out.records);

    std::vector<nlohmann::json> gen_rows;
    for (const auto &g : out.generations) {
        gen_rows.push_back(generation_to_json(g));
    }
    std::vector<nlohmann::json> rec_rows;
    for (const auto &r : out.records) {
        rec_rows.push_back(record_to_json(r));
    }
    write_file(dir / "generations.jsonl", jsonl(gen_rows));
    write_file(dir / "records.jsonl", jsonl(rec_rows));
    write_file(dir / "metrics.csv", format_metrics_csv(out.summary));
    write_file(dir / "report.md", format_report_md(cfg.task, out.summary));
    write_file(dir / "significance.json",
               significance_report(cfg.task, out.records, method_names(methods)).dump(2) + "\n");
    if (p.services.scorer && !cfg.scorer.cache.empty()) {
        p.services.scorer->save_cache(cfg.scorer.cache);
    }
    log << "wrote " << dir.string() << "\n";
    return out;
}

std::vector<AblationRow> cmd_ablate(const RunConfig &cfg, const std::vector<double> &alphas, std::ostream &log) {
    cfg.validate();
    if (alphas.size() < 2) {
        throw Error(ErrorKind::ConfigError, "ablate needs at least two alphas");
    }
    for (double a : alphas) {
        if (!std::isfinite(a)) {
            throw Error(ErrorKind::ConfigError, "alphas must be finite");
        }
    }
    const std::vector<Method> methods = {cfg.method};
    Prepared p = prepare(cfg, methods, log);
    require_metric_backends(cfg, p.services);

    const fs::path dir = make_run_dir(cfg);
    write_config(dir, cfg);
    const std::string metric = main_metric(cfg.task);

    std::vector<AblationRow> rows;
    std::vector<nlohmann::json> gen_rows;
    for (double a : alphas) {
        const auto gens = run_method(cfg, p.services, p.data.records, cfg.method, a, p.bank);
        const auto records = evaluate_all(cfg, p.services, p.data.records, gens);
        auto summary = summarize(records);
        rows.push_back({a, summary.at(0)});
        for (const auto &g : gens) {
            gen_rows.push_back(generation_to_json(g));
        }
        log << "alpha " << fmt(a, 3) << ": " << metric << " "
            << (row_value(summary.at(0), metric) ? fmt(*row_value(summary.at(0), metric), 4) : "-") << "\n";
    }

    std::vector<std::string> cols = {metric};
    for (const char *extra : {"fluency", "attribute_mass"}) {
        if (extra != metric) {
            cols.emplace_back(extra);
        }
    }
    std::string csv = "alpha,method,records";
    for (const auto &c : cols) {
        csv += "," + c;
    }
    csv += "\n";
    std::string md = "# alpha ablation (" + std::string(to_string(cfg.method)) + ", seed " + std::to_string(cfg.seed) +
                     ")\n\n| alpha | records |";
    std::string rule = "|------:|--------:|";
    for (const auto &c : cols) {
        md += " " + c + " |";
        rule += std::string(c.size() + 1, '-') + ":|";
    }
    md += "\n" + rule + "\n";
    for (const auto &row : rows) {
        csv += fmt(row.alpha, 4) + "," + row.summary.method + "," + std::to_string(row.summary.records);
        md += "| " + fmt(row.alpha, 2) + " | " + std::to_string(row.summary.records) + " |";
        for (const auto &c : cols) {
            const auto v = row_value(row.summary, c);
            csv += "," + (v ? fmt(*v, 6) : std::string());
            md += " " + (v ? fmt(*v, 4) : std::string("-")) + " |";
        }
        csv += "\n";
        md += "\n";
    }
    write_file(dir / "ablation.csv", csv);
    write_file(dir / "ablation.md", md);
    write_file(dir / "generations.jsonl", jsonl(gen_rows));
    log << "wrote " << (dir / "ablation.csv").string() << "\n";
    return rows;
}

IngestResult cmd_ingest_check(const RunConfig &cfg, std::ostream &log) {
    if (cfg.prompts.empty()) {
        throw Error(ErrorKind::ConfigError, "no prompts file configured");
    }
    IngestResult r = ingest_dataset(cfg.prompts, cfg.task);
    for (const auto &s : r.skipped) {
        log << "skip row " << s.row << " (" << s.id << "): " << s.reason << "\n";
    }
    if (!cfg.prefix_bank.empty()) {
        check_bank_overlap(load_prefix_bank(cfg.prefix_bank), r.records);
        log << "prefix bank is disjoint from the prompts\n";
    }
    log << r.records.size() << " records, " << r.skipped.size() << " skipped\n";
    return r;
}

} // namespace preadd::cli
