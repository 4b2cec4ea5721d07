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

// preadd: generate, bench, ablate and ingest-check over a JSON run config.
// Flags override config keys; unset flags leave the config (or its defaults) alone.

#include "preadd/cli/config.hpp"
#include "preadd/cli/runner.hpp"
#include "preadd/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> task;
    std::optional<std::string> method;
    std::optional<std::vector<std::string>> methods;
    std::optional<double> alpha;
    std::optional<std::string> prefix;
    std::optional<std::string> prefix_bank;
    std::optional<std::size_t> top_k;
    std::optional<double> top_p;
    std::optional<std::size_t> max_tokens;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend_url;
    std::optional<std::string> scorer_url;
    std::optional<std::string> out;
    std::optional<std::string> prompts;
    std::optional<std::string> run_id;
    std::optional<int> workers;
    std::optional<std::string> pfemale_table;
    bool no_truncate_first = false;
    bool trace = false;
};

void add_common(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--config,-c", o.config, "JSON run config");
    cmd->add_option("--task", o.task, "toxicity | bias | sentiment | freeform");
    cmd->add_option("--method", o.method, "raw | prompt | preadd-s | preadd-d | fudge");
    cmd->add_option("--alpha", o.alpha, "control strength");
    cmd->add_option("--prefix", o.prefix, "static control prefix text");
    cmd->add_option("--prefix-bank", o.prefix_bank, "prefix bank file (txt or jsonl)");
    cmd->add_option("--top-k", o.top_k, "keep the k most likely base tokens");
    cmd->add_option("--top-p", o.top_p, "nucleus mass on the base distribution");
    cmd->add_option("--max-tokens", o.max_tokens, "continuation length");
    cmd->add_option("--seed", o.seed, "run seed");
    cmd->add_option("--backend-url", o.backend_url, "remote generator server");
    cmd->add_option("--scorer-url", o.scorer_url, "remote scorer endpoint (key from PREADD_SCORER_KEY)");
    cmd->add_option("--out", o.out, "output root directory");
    cmd->add_option("--prompts", o.prompts, "prompt file (jsonl or csv)");
    cmd->add_option("--run-id", o.run_id, "output subdirectory name");
    cmd->add_option("--workers", o.workers, "worker threads (0 = all cores)");
    cmd->add_flag("--truncate-after-control", o.no_truncate_first, "truncate the combined distribution instead");
    cmd->add_flag("--trace", o.trace, "write per-step traces");
}

preadd::cli::RunConfig resolve(const Overrides &o) {
    using namespace preadd::cli;
    RunConfig c = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
    if (o.task) {
        c.task = parse_task(*o.task);
    }
    if (o.method) {
        c.method = parse_method(*o.method);
    }
    if (o.methods) {
        c.methods.clear();
        for (const auto &m : *o.methods) {
            c.methods.push_back(parse_method(m));
        }
    }
    if (o.alpha) {
        c.alpha = *o.alpha;
    }
    if (o.prefix) {
        c.prefix = *o.prefix;
    }
    if (o.prefix_bank) {
        c.prefix_bank = *o.prefix_bank;
    }
    if (o.top_k) {
        c.top_k = *o.top_k;
    }
    if (o.top_p) {
        c.top_p = *o.top_p;
    }
    if (o.max_tokens) {
        c.max_tokens = *o.max_tokens;
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.backend_url) {
        c.generator = ServiceSpec{};
        c.generator.kind = "remote";
        c.generator.url = *o.backend_url;
    }
    if (o.scorer_url) {
        c.scorer = ServiceSpec{};
        c.scorer.kind = "remote";
        c.scorer.url = *o.scorer_url;
    }
    if (o.out) {
        c.out = *o.out;
    }
    if (o.prompts) {
        c.prompts = *o.prompts;
    }
    if (o.run_id) {
        c.run_id = *o.run_id;
    }
    if (o.workers) {
        c.workers = *o.workers;
    }
    if (o.pfemale_table) {
        c.pfemale_table = *o.pfemale_table;
    }
    if (o.no_truncate_first) {
        c.truncate_before_control = false;
    }
    if (o.trace) {
        c.write_trace = true;
    }
    return c;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"prefix-adaptive decoding runs"};
    app.require_subcommand(1);

    Overrides gen_o, bench_o, ablate_o, check_o;
    std::vector<double> alphas;

    auto *gen = app.add_subcommand("generate", "decode one method over a prompt set");
    add_common(gen, gen_o);

    auto *bench = app.add_subcommand("bench", "generate every method, score, and write the summary report");
    add_common(bench, bench_o);
    bench->add_option("--methods", bench_o.methods, "methods to compare");
    bench->add_option("--pfemale-table", bench_o.pfemale_table, "bias task: aggregate precomputed p_female values");

    auto *ablate = app.add_subcommand("ablate", "sweep alpha with a fixed seed");
    add_common(ablate, ablate_o);
    ablate->add_option("--alphas", alphas, "alpha grid")->required()->delimiter(',');

    auto *check = app.add_subcommand("ingest-check", "validate a prompt file and prefix bank");
    add_common(check, check_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            preadd::cli::cmd_generate(resolve(gen_o), std::cerr);
        } else if (bench->parsed()) {
            const auto out = preadd::cli::cmd_bench(resolve(bench_o), std::cerr);
            std::cout << preadd::cli::format_report_md(resolve(bench_o).task, out.summary);
        } else if (ablate->parsed()) {
            preadd::cli::cmd_ablate(resolve(ablate_o), alphas, std::cerr);
        } else if (check->parsed()) {
            preadd::cli::cmd_ingest_check(resolve(check_o), std::cout);
        }
    } catch (const preadd::Error &e) {
        std::cerr << "preadd: " << e.what() << "\n";
        return preadd::exit_code_for(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "preadd: internal error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
