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

#include "preadd/prefixes.hpp"

#include "preadd/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

namespace preadd {

ContextPair build_contexts(const Backend &backend, std::string_view prefix, std::string_view prompt,
                           std::string_view separator) {
    ContextPair out;
    out.raw = backend.tokenize(prompt);
    if (out.raw.empty()) {
        throw Error(ErrorKind::EmptyInput, "prompt tokenizes to nothing");
    }
    if (prefix.empty()) {
        out.prefixed = out.raw;
        return out;
    }
    std::string joined;
    joined.reserve(prefix.size() + separator.size() + prompt.size());
    joined.append(prefix).append(separator).append(prompt);
    out.prefixed = backend.tokenize(joined);
    if (out.prefixed.ends_with(out.raw)) {
        return out;
    }

    std::string head;
    head.append(prefix).append(separator);
    Context repaired = backend.tokenize(head);
    repaired.tokens.insert(repaired.tokens.end(), out.raw.tokens.begin(), out.raw.tokens.end());
    if (!repaired.ends_with(out.raw) || repaired.size() <= out.raw.size()) {
        throw Error(ErrorKind::SuffixViolation, "could not keep the prompt tokens as a suffix of the prefixed context");
    }
    out.prefixed = std::move(repaired);
    return out;
}

EmbeddingVector EmbeddingVector::from_values(std::vector<double> values) {
    double sq = 0.0;
    for (double v : values) {
        sq += v * v;
    }
    EmbeddingVector e;
    e.values = std::move(values);
    e.norm = std::sqrt(sq);
    return e;
}

double cosine_similarity(const EmbeddingVector &u, const EmbeddingVector &v) {
    if (u.norm <= 0.0 || v.norm <= 0.0) {
        return 0.0;
    }
    if (u.values.size() != v.values.size()) {
        throw Error(ErrorKind::LengthMismatch, "embeddings differ in dimension");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
    }
    return std::clamp(dot / (u.norm * v.norm), -1.0, 1.0);
}

std::vector<std::string> analyze_terms(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c == '\'' || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) {
        out.push_back(std::move(cur));
    }
    return out;
}

CorpusStats::CorpusStats(const std::vector<std::string> &documents) : num_docs_(documents.size()) {
    std::vector<std::set<std::string>> doc_terms;
    doc_terms.reserve(documents.size());
    for (const auto &d : documents) {
        auto terms = analyze_terms(d);
        doc_terms.emplace_back(terms.begin(), terms.end());
        for (const auto &t : doc_terms.back()) {
            terms_.emplace(t, 0);
        }
    }
    std::size_t i = 0;
    for (auto &[term, idx] : terms_) {
        idx = i++;
    }
    df_.assign(terms_.size(), 0);
    for (const auto &terms : doc_terms) {
        for (const auto &t : terms) {
            ++df_[terms_.at(t)];
        }
    }
}

std::optional<std::size_t> CorpusStats::term_index(const std::string &term) const {
    auto it = terms_.find(term);
    if (it == terms_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double CorpusStats::idf(std::size_t term_index) const {
    const double n = static_cast<double>(num_docs_);
    const double df = static_cast<double>(df_.at(term_index));
    return std::log((1.0 + n) / (1.0 + df)) + 1.0;
}

EmbeddingVector tfidf_embed(std::string_view text, const CorpusStats &stats) {
    std::vector<double> v(stats.num_terms(), 0.0);
    for (const auto &term : analyze_terms(text)) {
        if (auto idx = stats.term_index(term)) {
            v[*idx] += 1.0;
        }
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            v[i] *= stats.idf(i);
        }
    }
    return EmbeddingVector::from_values(std::move(v));
}

RemoteEmbedder::RemoteEmbedder(std::string base_url, RetryPolicy policy) : client_(std::move(base_url), policy) {}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
    const nlohmann::json res = client_.post("/v1/embed", {{"text", std::string(text)}});
    if (!res.contains("embedding") || !res["embedding"].is_array()) {
        throw Error(ErrorKind::BackendError, "response lacks an embedding array");
    }
    return EmbeddingVector::from_values(res["embedding"].get<std::vector<double>>());
}

void PrefixSpec::validate() const {
    if (mode == PrefixMode::Static && !static_text) {
        throw Error(ErrorKind::ConfigError, "static prefix mode needs prefix text");
    }
    if (mode == PrefixMode::Dynamic && bank.empty()) {
        throw Error(ErrorKind::EmptyBank, "dynamic prefix mode needs a non-empty bank");
    }
}

DynamicPrefix select_dynamic_prefix(std::string_view prompt, const std::vector<std::string> &bank,
                                    const Embedder &embedder) {
    if (bank.empty()) {
        throw Error(ErrorKind::EmptyBank, "prefix bank is empty");
    }
    const EmbeddingVector query = embedder.embed(prompt);
    DynamicPrefix best;
    best.score = -2.0;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const double s = cosine_similarity(query, embedder.embed(bank[i]));
        if (s > best.score) {
            best.score = s;
            best.index = i;
        }
    }
    best.prefix = bank[best.index];
    best.leaked = best.prefix == prompt;
    return best;
}

std::vector<BankEntry> load_prefix_bank(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open prefix bank " + path);
    }
    std::vector<BankEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) {
            continue;
        }
        if (line[first] == '{') {
            try {
                const auto j = nlohmann::json::parse(line);
                BankEntry e;
                e.text = j.at("text").get<std::string>();
                if (j.contains("score") && !j["score"].is_null()) {
                    e.score = j["score"].get<double>();
                }
                out.push_back(std::move(e));
            } catch (const nlohmann::json::exception &ex) {
                throw Error(ErrorKind::SchemaError, path + ":" + std::to_string(lineno) + ": " + ex.what());
            }
        } else {
            out.push_back({line, std::nullopt});
        }
    }
    return out;
}

} // namespace preadd
