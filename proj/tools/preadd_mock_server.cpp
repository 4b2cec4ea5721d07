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

// Reference server for the preadd-backend/1 protocol, backed by an n-gram model.

#include "preadd/cli/dataset.hpp"
#include "preadd/error.hpp"
#include "preadd/mock_server.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char **argv) {
    CLI::App app{"preadd mock inference server"};
    std::string corpus;
    std::string eos;
    std::string host = "127.0.0.1";
    int port = 8080;
    int order = 3;
    std::string toxic_words;
    std::string positive;
    std::string negative;
    app.add_option("--corpus", corpus, "training text, one sentence per line")->required();
    app.add_option("--order", order, "n-gram order");
    app.add_option("--eos", eos, "end-of-sequence word");
    app.add_option("--host", host, "bind address");
    app.add_option("--port", port, "bind port");
    app.add_option("--score-words", toxic_words, "word list backing /v1/score");
    app.add_option("--positive", positive, "positive lexicon backing /v1/classify");
    app.add_option("--negative", negative, "negative lexicon backing /v1/classify");
    CLI11_PARSE(app, argc, argv);

    try {
        using namespace preadd;
        auto model = std::make_shared<const NgramModel>(train_ngram_from_lines(cli::read_lines(corpus), order));
        std::optional<TokenId> eos_id;
        if (!eos.empty()) {
            eos_id = model->vocab().id(eos);
        }
        MockServerOptions opts;
        opts.backend = std::make_shared<NgramBackend>(model, eos_id, "mock-ngram");
        opts.embedder = std::make_shared<TfidfEmbedder>(CorpusStats(cli::read_lines(corpus)));
        if (!toxic_words.empty()) {
            opts.scorer = std::make_shared<WordListScorer>(cli::read_word_set(toxic_words));
        }
        if (const char *key = std::getenv(kScorerKeyEnv)) {
            opts.scorer_key = key;
        }
        if (!positive.empty()) {
            opts.positive_words = cli::read_word_set(positive);
        }
        if (!negative.empty()) {
            opts.negative_words = cli::read_word_set(negative);
        }
        MockServer server(std::move(opts));
        std::cerr << "serving on http://" << host << ":" << port << "\n";
        server.listen_blocking(host, port);
    } catch (const preadd::Error &e) {
        std::cerr << "preadd_mock_server: " << e.what() << "\n";
        return preadd::exit_code_for(e.kind());
    }
    return 0;
}
