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

// Run orchestration behind the preadd command line.
//
// Output layout: <out>/<run-id>/
//   config.json        resolved configuration snapshot
//   generations.jsonl  one record per (method, prompt)
//   records.jsonl      per-record metrics (bench)
//   metrics.csv        one summary row per method (bench)
//   report.md          aligned markdown version of metrics.csv (bench)
//   significance.json  paired t-tests on the task's main metric (bench)
//   ablation.csv/.md   one row per alpha (ablate)

#include "preadd/baselines.hpp"
#include "preadd/cli/config.hpp"
#include "preadd/cli/dataset.hpp"
#include "preadd/metrics.hpp"
#include "preadd/prefixes.hpp"
#include "preadd/scoring.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace preadd::cli {

struct Services {
    std::shared_ptr<const Backend> generator;
    std::shared_ptr<const Backend> evaluator;
    std::shared_ptr<const Embedder> embedder;
    std::shared_ptr<ScorerClient> scorer;
    std::shared_ptr<const SentimentClassifier> classifier;
    std::shared_ptr<const Discriminator> discriminator;
    // Generator-vocabulary mask of attribute words; empty when none are configured.
    std::vector<bool> attribute_mask;
};

Services build_services(const RunConfig &cfg);

struct Generation {
    std::string id;
    Method method = Method::Raw;
    std::optional<double> alpha;
    std::optional<std::string> prefix_used;
    std::optional<DynamicPrefix> dynamic;
    std::string continuation;
    std::vector<TokenId> tokens;
    bool stopped_at_eos = false;
    std::optional<double> attribute_mass;
    std::optional<double> p_female; // bias task: single-step evaluation
    std::optional<std::string> trace_path;
};

// Runs one method over every prompt on a worker pool. Each prompt draws from its
// own stream, CounterRng::for_stream(cfg.seed, id), so results do not depend on
// the pool width or on which other methods run.
std::vector<Generation> run_method(const RunConfig &cfg, const Services &services,
                                   const std::vector<PromptRecord> &prompts, Method method, double alpha,
                                   const std::vector<std::string> &bank, const std::string &trace_dir = "");

nlohmann::json generation_to_json(const Generation &g);

// Main metric used for significance testing and ablation tables.
std::string main_metric(Task task);

struct RunOutputs {
    std::string dir;
    std::vector<Generation> generations;
    std::vector<EvalRecord> records;
    std::vector<SummaryRow> summary;
};

// generate: config.json + generations.jsonl.
RunOutputs cmd_generate(const RunConfig &cfg, std::ostream &log);

// bench: generation for every method, metrics, summary table and significance.
RunOutputs cmd_bench(const RunConfig &cfg, std::ostream &log);

struct AblationRow {
    double alpha = 0.0;
    SummaryRow summary;
};

// ablate: one bench row per alpha with a constant seed.
std::vector<AblationRow> cmd_ablate(const RunConfig &cfg, const std::vector<double> &alphas, std::ostream &log);

// ingest-check: validates the prompt file (and bank overlap) without running anything.
IngestResult cmd_ingest_check(const RunConfig &cfg, std::ostream &log);

std::string format_metrics_csv(const std::vector<SummaryRow> &rows);
std::string format_report_md(Task task, const std::vector<SummaryRow> &rows);
nlohmann::json significance_report(Task task, const std::vector<EvalRecord> &records,
                                   const std::vector<std::string> &methods);

} // namespace preadd::cli
