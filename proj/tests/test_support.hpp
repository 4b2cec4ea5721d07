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

#include "preadd/error.hpp"
#include "preadd/ngram.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

namespace preadd::testing {

inline std::string fixture(const std::string &rel) {
    return std::string(PREADD_FIXTURES) + "/" + rel;
}

inline nlohmann::json load_json(const std::string &rel) {
    std::ifstream in(fixture(rel));
    return nlohmann::json::parse(in);
}

inline const nlohmann::json &oracle() {
    static const nlohmann::json values = load_json("oracles/values.json");
    return values;
}

// Bigram over "a b a b": vocab [<unk>, a, b].
inline std::shared_ptr<NgramBackend> abab_bigram(std::optional<TokenId> eos = std::nullopt) {
    auto model = std::make_shared<const NgramModel>(train_ngram_from_lines({"a b a b"}, 2, 1.0));
    return std::make_shared<NgramBackend>(model, eos);
}

inline LogProbVector from_probs(const std::vector<double> &p) {
    std::vector<double> lp;
    for (double x : p) {
        lp.push_back(std::log(x));
    }
    return LogProbVector(std::move(lp));
}

template <class Fn>
ErrorKind error_kind_of(Fn &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    throw std::runtime_error("expected preadd::Error");
}

} // namespace preadd::testing
