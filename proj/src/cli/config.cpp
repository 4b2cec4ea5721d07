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

#include "preadd/cli/config.hpp"

#include "preadd/error.hpp"
#include "preadd/http.hpp"
#include "preadd/prefixes.hpp"
#include "preadd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

namespace preadd::cli {

namespace fs = std::filesystem;

const char *to_string(Task t) {
    switch (t) {
    case Task::Toxicity: return "toxicity";
    case Task::Bias: return "bias";
    case Task::Sentiment: return "sentiment";
    case Task::Freeform: return "freeform";
    }
    return "freeform";
}

const char *to_string(Method m) {
    switch (m) {
    case Method::Raw: return "raw";
    case Method::Prompt: return "prompt";
    case Method::PreaddStatic: return "preadd-s";
    case Method::PreaddDynamic: return "preadd-d";
    case Method::Fudge: return "fudge";
    }
    return "raw";
}

Task parse_task(const std::string &s) {
    for (Task t : {Task::Toxicity, Task::Bias, Task::Sentiment, Task::Freeform}) {
        if (s == to_string(t)) {
            return t;
        }
    }
    throw Error(ErrorKind::ConfigError, "unknown task '" + s + "' (toxicity|bias|sentiment|freeform)");
}

Method parse_method(const std::string &s) {
    for (Method m : {Method::Raw, Method::Prompt, Method::PreaddStatic, Method::PreaddDynamic, Method::Fudge}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    throw Error(ErrorKind::ConfigError, "unknown method '" + s + "' (raw|prompt|preadd-s|preadd-d|fudge)");
}

double RunConfig::effective_alpha() const {
    if (alpha) {
        return *alpha;
    }
    return task == Task::Sentiment ? 2.0 : -1.0;
}

std::size_t RunConfig::effective_max_tokens() const {
    if (task == Task::Bias) {
        return 1;
    }
    if (max_tokens) {
        return *max_tokens;
    }
    return task == Task::Sentiment ? 64 : 32;
}

std::string RunConfig::effective_prefix() const {
    if (prefix) {
        return *prefix;
    }
    switch (task) {
    case Task::Toxicity: return prefix_text::kToxicity;
    case Task::Bias: return prefix_text::kGenderBias;
    case Task::Sentiment:
        return target_sentiment == "negative" ? prefix_text::kNegativeSentiment : prefix_text::kPositiveSentiment;
    case Task::Freeform: return "";
    }
    return "";
}

std::string RunConfig::effective_instruction_prefix() const {
    if (instruction_prefix) {
        return *instruction_prefix;
    }
    switch (task) {
    case Task::Toxicity: return prefix_text::kToxicityNegPrompt;
    case Task::Bias: return prefix_text::kGenderBiasNegPrompt;
    // Positive prompting uses the same text as the static control prefix.
    case Task::Sentiment: return effective_prefix();
    case Task::Freeform: return effective_prefix();
    }
    return "";
}

std::string RunConfig::effective_separator() const {
    return prefix_newline ? std::string("\n") : separator;
}

std::vector<Method> RunConfig::effective_methods() const {
    if (!methods.empty()) {
        return methods;
    }
    std::vector<Method> out{Method::Raw, Method::Prompt};
    if (discriminator.set()) {
        out.push_back(Method::Fudge);
    }
    out.push_back(Method::PreaddStatic);
    if (!prefix_bank.empty() && task != Task::Bias) {
        out.push_back(Method::PreaddDynamic);
    }
    return out;
}

ControlConfig RunConfig::control(double alpha_override) const {
    ControlConfig c;
    c.alpha = alpha_override;
    c.top_k = top_k;
    c.top_p = top_p;
    c.truncate_before_control = truncate_before_control;
    c.max_tokens = effective_max_tokens();
    c.seed = seed;
    return c;
}

void RunConfig::validate() const {
    if (task == Task::Bias && !pfemale_table.empty()) {
        return; // bench reads precomputed p_female values; nothing is generated
    }
    if (!generator.set()) {
        throw Error(ErrorKind::ConfigError, "no generator backend configured");
    }
    if (generator.kind == "ngram" && generator.corpus.empty()) {
        throw Error(ErrorKind::ConfigError, "ngram generator needs a corpus path");
    }
    if (generator.kind == "remote" && generator.url.empty()) {
        throw Error(ErrorKind::ConfigError, "remote generator needs a url");
    }
    if (generator.kind != "ngram" && generator.kind != "remote") {
        throw Error(ErrorKind::ConfigError, "generator kind must be ngram or remote");
    }
    if (!std::isfinite(effective_alpha())) {
        throw Error(ErrorKind::ConfigError, "alpha must be finite");
    }
    if (prompts.empty()) {
        throw Error(ErrorKind::ConfigError, "no prompts file configured");
    }
    if (workers < 0) {
        throw Error(ErrorKind::ConfigError, "workers must be >= 0");
    }
    if (target_sentiment != "positive" && target_sentiment != "negative") {
        throw Error(ErrorKind::ConfigError, "target_sentiment must be positive or negative");
    }
    auto check_method = [&](Method m) {
        if (m == Method::PreaddDynamic && prefix_bank.empty()) {
            throw Error(ErrorKind::ConfigError, "method preadd-d needs a prefix bank");
        }
        if (m == Method::Fudge && !discriminator.set()) {
            throw Error(ErrorKind::ConfigError, "method fudge needs a discriminator");
        }
    };
    check_method(method);
    for (Method m : methods) {
        check_method(m);
    }
    control().validate();
    if (fudge_top_k == 0) {
        throw Error(ErrorKind::InvalidK, "fudge_top_k must be >= 1");
    }
}

namespace {

std::string resolve_path(const std::string &p, const std::string &base_dir) {
    if (p.empty() || base_dir.empty() || fs::path(p).is_absolute()) {
        return p;
    }
    return (fs::path(base_dir) / p).lexically_normal().string();
}

void reject_unknown_keys(const nlohmann::json &j, std::initializer_list<std::string_view> known,
                         const std::string &where) {
    for (const auto &[key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw Error(ErrorKind::ConfigError, "unknown key \"" + key + "\" in " + where);
        }
    }
}

ServiceSpec service_from_json(const nlohmann::json &j, const std::string &base) {
    ServiceSpec s;
    if (j.is_null()) {
        return s;
    }
    if (!j.is_object()) {
        throw Error(ErrorKind::ConfigError, "service entries must be JSON objects");
    }
    reject_unknown_keys(j,
                        {"kind", "url", "corpus", "order", "smoothing", "eos", "words", "attribute_corpus",
                         "other_corpus", "positive", "negative", "requests_per_sec", "cache"},
                        "service spec");
    s.kind = j.value("kind", std::string());
    s.url = j.value("url", std::string());
    s.corpus = resolve_path(j.value("corpus", std::string()), base);
    s.order = j.value("order", 3);
    s.smoothing = j.value("smoothing", 1.0);
    if (j.contains("eos") && !j["eos"].is_null()) {
        s.eos = j["eos"].get<std::string>();
    }
    s.words = resolve_path(j.value("words", std::string()), base);
    s.attribute_corpus = resolve_path(j.value("attribute_corpus", std::string()), base);
    s.other_corpus = resolve_path(j.value("other_corpus", std::string()), base);
    s.positive = resolve_path(j.value("positive", std::string()), base);
    s.negative = resolve_path(j.value("negative", std::string()), base);
    s.requests_per_sec = j.value("requests_per_sec", 0.0);
    s.cache = resolve_path(j.value("cache", std::string()), base);
    return s;
}

nlohmann::json service_to_json(const ServiceSpec &s) {
    if (!s.set()) {
        return nullptr;
    }
    nlohmann::json j = {{"kind", s.kind}};
    auto put = [&](const char *key, const std::string &v) {
        if (!v.empty()) {
            j[key] = v;
        }
    };
    put("url", s.url);
    put("corpus", s.corpus);
    if (s.kind == "ngram") {
        j["order"] = s.order;
        j["smoothing"] = s.smoothing;
        j["eos"] = s.eos ? nlohmann::json(*s.eos) : nlohmann::json(nullptr);
    }
    put("words", s.words);
    put("attribute_corpus", s.attribute_corpus);
    put("other_corpus", s.other_corpus);
    put("positive", s.positive);
    put("negative", s.negative);
    if (s.requests_per_sec > 0.0) {
        j["requests_per_sec"] = s.requests_per_sec;
    }
    put("cache", s.cache);
    return j;
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json &j, const std::string &base) {
    if (!j.is_object()) {
        throw Error(ErrorKind::ConfigError, "config must be a JSON object");
    }
    reject_unknown_keys(j,
                        {"task", "method", "methods", "alpha", "prefix", "instruction_prefix", "prefix_bank",
                         "separator", "prefix_newline", "top_k", "top_p", "truncate_before_control", "max_tokens",
                         "seed", "prompts", "out", "run_id", "workers", "target_sentiment", "attribute_words",
                         "full_utterance_toxicity", "relevance_full_text", "pfemale_table", "fudge_top_k",
                         "write_trace", "generator", "evaluator", "embedder", "scorer", "classifier",
                         "discriminator"},
                        "run config");
    RunConfig c;
    try {
        if (j.contains("task")) {
            c.task = parse_task(j["task"].get<std::string>());
        }
        if (j.contains("method")) {
            c.method = parse_method(j["method"].get<std::string>());
        }
        if (j.contains("methods")) {
            for (const auto &m : j["methods"]) {
                c.methods.push_back(parse_method(m.get<std::string>()));
            }
        }
        if (j.contains("alpha") && !j["alpha"].is_null()) {
            c.alpha = j["alpha"].get<double>();
        }
        if (j.contains("prefix") && !j["prefix"].is_null()) {
            c.prefix = j["prefix"].get<std::string>();
        }
        if (j.contains("instruction_prefix") && !j["instruction_prefix"].is_null()) {
            c.instruction_prefix = j["instruction_prefix"].get<std::string>();
        }
        c.prefix_bank = resolve_path(j.value("prefix_bank", std::string()), base);
        c.separator = j.value("separator", std::string(" "));
        c.prefix_newline = j.value("prefix_newline", false);
        if (j.contains("top_k") && !j["top_k"].is_null()) {
            c.top_k = j["top_k"].get<std::size_t>();
        }
        if (j.contains("top_p") && !j["top_p"].is_null()) {
            c.top_p = j["top_p"].get<double>();
        }
        c.truncate_before_control = j.value("truncate_before_control", true);
        if (j.contains("max_tokens") && !j["max_tokens"].is_null()) {
            c.max_tokens = j["max_tokens"].get<std::size_t>();
        }
        c.seed = j.value("seed", std::uint64_t{0});
        c.prompts = resolve_path(j.value("prompts", std::string()), base);
        c.out = j.contains("out") ? resolve_path(j["out"].get<std::string>(), base) : c.out;
        c.run_id = j.value("run_id", std::string());
        c.workers = j.value("workers", 1);
        c.target_sentiment = j.value("target_sentiment", std::string("positive"));
        c.attribute_words = resolve_path(j.value("attribute_words", std::string()), base);
        c.full_utterance_toxicity = j.value("full_utterance_toxicity", false);
        c.relevance_full_text = j.value("relevance_full_text", false);
        c.pfemale_table = resolve_path(j.value("pfemale_table", std::string()), base);
        c.fudge_top_k = j.value("fudge_top_k", std::size_t{100});
        c.write_trace = j.value("write_trace", false);
        c.generator = service_from_json(j.value("generator", nlohmann::json()), base);
        c.evaluator = service_from_json(j.value("evaluator", nlohmann::json()), base);
        c.embedder = service_from_json(j.value("embedder", nlohmann::json()), base);
        c.scorer = service_from_json(j.value("scorer", nlohmann::json()), base);
        c.classifier = service_from_json(j.value("classifier", nlohmann::json()), base);
        c.discriminator = service_from_json(j.value("discriminator", nlohmann::json()), base);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::ConfigError, std::string("bad config value: ") + e.what());
    }
    return c;
}

RunConfig RunConfig::load(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::ConfigError, "cannot open config " + path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorKind::ConfigError, path + ": " + e.what());
    }
    return from_json(j, fs::path(path).parent_path().string());
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["task"] = to_string(task);
    j["method"] = to_string(method);
    nlohmann::json ms = nlohmann::json::array();
    for (Method m : effective_methods()) {
        ms.push_back(to_string(m));
    }
    j["methods"] = ms;
    j["alpha"] = effective_alpha();
    j["prefix"] = effective_prefix();
    j["instruction_prefix"] = effective_instruction_prefix();
    j["prefix_bank"] = prefix_bank;
    j["separator"] = separator;
    j["prefix_newline"] = prefix_newline;
    j["top_k"] = top_k ? nlohmann::json(*top_k) : nlohmann::json(nullptr);
    j["top_p"] = top_p ? nlohmann::json(*top_p) : nlohmann::json(nullptr);
    j["truncate_before_control"] = truncate_before_control;
    j["max_tokens"] = effective_max_tokens();
    j["seed"] = seed;
    j["prompts"] = prompts;
    j["out"] = out;
    j["run_id"] = run_id;
    j["workers"] = workers;
    j["target_sentiment"] = target_sentiment;
    j["attribute_words"] = attribute_words;
    j["full_utterance_toxicity"] = full_utterance_toxicity;
    j["relevance_full_text"] = relevance_full_text;
    j["pfemale_table"] = pfemale_table;
    j["fudge_top_k"] = fudge_top_k;
    j["write_trace"] = write_trace;
    j["generator"] = service_to_json(generator);
    j["evaluator"] = service_to_json(evaluator);
    j["embedder"] = service_to_json(embedder);
    j["scorer"] = service_to_json(scorer);
    j["classifier"] = service_to_json(classifier);
    j["discriminator"] = service_to_json(discriminator);
    return j;
}

std::string RunConfig::resolved_run_id() const {
    if (!run_id.empty()) {
        return run_id;
    }
    nlohmann::json j = to_json();
    j.erase("out");
    j.erase("run_id");
    j.erase("workers");
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(dump_json(j))));
    return std::string(to_string(task)) + "-" + std::string(buf).substr(0, 12);
}

} // namespace preadd::cli
