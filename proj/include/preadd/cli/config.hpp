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

#pragma once

#include "preadd/decoding.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace preadd::cli {

enum class Task { Toxicity, Bias, Sentiment, Freeform };
enum class Method { Raw, Prompt, PreaddStatic, PreaddDynamic, Fudge };

const char *to_string(Task t);
const char *to_string(Method m);
Task parse_task(const std::string &s);
Method parse_method(const std::string &s);

// A model-like service: "ngram" (trained from a corpus file) or "remote" (URL).
struct ServiceSpec {
    std::string kind;
    std::string url;
    // ngram
    std::string corpus;
    int order = 3;
    double smoothing = 1.0;
    std::optional<std::string> eos;
    // wordlist scorer / naive-bayes discriminator / lexicon classifier
    std::string words;
    std::string attribute_corpus;
    std::string other_corpus;
    std::string positive;
    std::string negative;
    // remote scorer pacing and cache
    double requests_per_sec = 0.0;
    std::string cache;

    bool set() const noexcept {
        return !kind.empty();
    }
};

struct RunConfig {
    Task task = Task::Toxicity;
    Method method = Method::PreaddStatic;
    std::vector<Method> methods; // bench; empty = every method the task supports
    std::optional<double> alpha; // unset = task default
    std::optional<std::string> prefix;
    std::optional<std::string> instruction_prefix;
    std::string prefix_bank;
    std::string separator = " ";
    bool prefix_newline = false; // separator becomes "\n"
    std::optional<std::size_t> top_k;
    std::optional<double> top_p;
    bool truncate_before_control = true;
    std::optional<std::size_t> max_tokens;
    std::uint64_t seed = 0;
    std::string prompts;
    std::string out = "out";
    std::string run_id;
    int workers = 1;
    std::string target_sentiment = "positive";
    std::string attribute_words;
    bool full_utterance_toxicity = false;
    bool relevance_full_text = false; // embed prompt+continuation instead of the continuation
    std::string pfemale_table;
    std::size_t fudge_top_k = 100;
    bool write_trace = false;

    ServiceSpec generator;
    ServiceSpec evaluator;
    ServiceSpec embedder;
    ServiceSpec scorer;
    ServiceSpec classifier;
    ServiceSpec discriminator;

    double effective_alpha() const;
    std::size_t effective_max_tokens() const;
    std::string effective_prefix() const;
    std::string effective_instruction_prefix() const;
    std::string effective_separator() const;
    std::vector<Method> effective_methods() const;
    ControlConfig control(double alpha_override) const;
    ControlConfig control() const {
        return control(effective_alpha());
    }

    // Throws ConfigError on inconsistent settings.
    void validate() const;

    // Relative paths are resolved against base_dir.
    static RunConfig from_json(const nlohmann::json &j, const std::string &base_dir = "");
    static RunConfig load(const std::string &path);
    nlohmann::json to_json() const;

    // <task>-<hash of the resolved config> unless run_id is set.
    std::string resolved_run_id() const;
};

} // namespace preadd::cli
