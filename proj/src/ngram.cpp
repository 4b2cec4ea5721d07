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

#include "preadd/ngram.hpp"

#include "preadd/decoding.hpp"
#include "preadd/error.hpp"

#include <cctype>
#include <cmath>

namespace preadd {

Vocabulary::Vocabulary() {
    add(std::string(kUnkText));
}

Vocabulary Vocabulary::from_sequences(const std::vector<std::vector<std::string>> &sequences) {
    Vocabulary v;
    for (const auto &seq : sequences) {
        for (const auto &w : seq) {
            v.add(w);
        }
    }
    return v;
}

TokenId Vocabulary::add(const std::string &word) {
    auto it = index_.find(word);
    if (it != index_.end()) {
        return it->second;
    }
    const auto id = static_cast<TokenId>(words_.size());
    words_.push_back(word);
    index_.emplace(word, id);
    return id;
}

TokenId Vocabulary::id(std::string_view word) const {
    auto it = index_.find(std::string(word));
    return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view word) const {
    return index_.count(std::string(word)) > 0;
}

const std::string &Vocabulary::word(TokenId id) const {
    if (id >= words_.size()) {
        throw Error(ErrorKind::TokenOutOfRange, "token id " + std::to_string(id) + " outside vocabulary");
    }
    return words_[id];
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) {
            ++j;
        }
        if (j > i) {
            out.emplace_back(text.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

std::size_t TokenSeqHash::operator()(const std::vector<TokenId> &seq) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (TokenId t : seq) {
        h ^= t;
        h *= 0x100000001B3ULL;
    }
    return static_cast<std::size_t>(h);
}

NgramModel::NgramModel(int order, double smoothing, Vocabulary vocab, bool unk_in_support)
    : order_(order), smoothing_(smoothing), vocab_(std::move(vocab)), unk_in_support_(unk_in_support) {
    if (order < 1) {
        throw Error(ErrorKind::ConfigError, "n-gram order must be >= 1");
    }
    if (!(smoothing > 0.0)) {
        throw Error(ErrorKind::ConfigError, "smoothing must be > 0");
    }
    if (support_size() == 0) {
        throw Error(ErrorKind::EmptyCorpus, "vocabulary has no emittable tokens");
    }
    tables_.resize(static_cast<std::size_t>(order));
}

void NgramModel::observe(std::span<const TokenId> sequence) {
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const TokenId next = sequence[i];
        if (next >= vocab_.size()) {
            throw Error(ErrorKind::TokenOutOfRange, "token id " + std::to_string(next) + " outside vocabulary");
        }
        for (int len = 0; len < order_ && static_cast<std::size_t>(len) <= i; ++len) {
            std::vector<TokenId> ctx(sequence.begin() + static_cast<std::ptrdiff_t>(i) - len,
                                     sequence.begin() + static_cast<std::ptrdiff_t>(i));
            NgramCounts &row = tables_[static_cast<std::size_t>(len)][std::move(ctx)];
            ++row.next[next];
            ++row.total;
        }
    }
}

const NgramCounts &NgramModel::row_for(std::span<const TokenId> ctx) const {
    std::size_t len = std::min<std::size_t>(ctx.size(), static_cast<std::size_t>(order_ - 1));
    std::vector<TokenId> key;
    for (;; --len) {
        key.assign(ctx.end() - static_cast<std::ptrdiff_t>(len), ctx.end());
        const Table &t = tables_[len];
        auto it = t.find(key);
        if (it != t.end()) {
            return it->second;
        }
        if (len == 0) {
            break;
        }
    }
    throw Error(ErrorKind::EmptyCorpus, "n-gram model has no unigram counts");
}

double NgramModel::probability(std::span<const TokenId> ctx, TokenId token) const {
    if (token >= vocab_.size()) {
        throw Error(ErrorKind::TokenOutOfRange, "token id " + std::to_string(token) + " outside vocabulary");
    }
    if (token == Vocabulary::kUnk && !unk_in_support_) {
        return 0.0;
    }
    const NgramCounts &row = row_for(ctx);
    auto it = row.next.find(token);
    const double count = it == row.next.end() ? 0.0 : static_cast<double>(it->second);
    return (count + smoothing_) / (static_cast<double>(row.total) + smoothing_ * static_cast<double>(support_size()));
}

double NgramModel::sequence_logprob(std::span<const TokenId> tokens) const {
    double lp = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        lp += std::log(probability(tokens.subspan(0, i), tokens[i]));
    }
    return lp;
}

std::vector<double> NgramModel::next_logprobs(std::span<const TokenId> ctx) const {
    const NgramCounts &row = row_for(ctx);
    const double denom =
        std::log(static_cast<double>(row.total) + smoothing_ * static_cast<double>(support_size()));
    const double unseen = std::log(smoothing_) - denom;
    std::vector<double> out(vocab_.size(), unseen);
    for (const auto &[tok, count] : row.next) {
        out[tok] = std::log(static_cast<double>(count) + smoothing_) - denom;
    }
    if (!unk_in_support_) {
        out[Vocabulary::kUnk] = kNegInf;
    }
    return out;
}

NgramModel train_ngram(const std::vector<std::vector<TokenId>> &sequences, int order, double smoothing,
                       Vocabulary vocab, bool unk_in_support) {
    std::size_t tokens = 0;
    for (const auto &s : sequences) {
        tokens += s.size();
    }
    if (tokens == 0) {
        throw Error(ErrorKind::EmptyCorpus, "training corpus has no tokens");
    }
    NgramModel model(order, smoothing, std::move(vocab), unk_in_support);
    for (const auto &s : sequences) {
        model.observe(s);
    }
    return model;
}

NgramModel train_ngram_from_lines(const std::vector<std::string> &lines, int order, double smoothing,
                                  bool unk_in_support) {
    std::vector<std::vector<std::string>> words;
    for (const auto &line : lines) {
        auto w = split_whitespace(line);
        if (!w.empty()) {
            words.push_back(std::move(w));
        }
    }
    Vocabulary vocab = Vocabulary::from_sequences(words);
    std::vector<std::vector<TokenId>> ids;
    ids.reserve(words.size());
    for (const auto &seq : words) {
        std::vector<TokenId> s;
        s.reserve(seq.size());
        for (const auto &w : seq) {
            s.push_back(vocab.id(w));
        }
        ids.push_back(std::move(s));
    }
    return train_ngram(ids, order, smoothing, std::move(vocab), unk_in_support);
}

NgramBackend::NgramBackend(std::shared_ptr<const NgramModel> model, std::optional<TokenId> eos, std::string name)
    : model_(std::move(model)) {
    desc_.kind = BackendKind::Ngram;
    desc_.vocab = model_->vocab().words();
    desc_.vocab_size = desc_.vocab.size();
    desc_.eos_token = eos;
    desc_.concurrent_safe = true;
    desc_.model_name = std::move(name);
    if (eos && *eos >= desc_.vocab_size) {
        throw Error(ErrorKind::TokenOutOfRange, "eos token outside vocabulary");
    }
}

LogProbVector NgramBackend::next_token_logprobs(const Context &ctx) const {
    for (TokenId t : ctx.tokens) {
        if (t >= desc_.vocab_size) {
            throw Error(ErrorKind::TokenOutOfRange, "token id " + std::to_string(t) + " outside vocabulary");
        }
    }
    return renormalize(model_->next_logprobs(ctx.tokens));
}

Context NgramBackend::tokenize(std::string_view text) const {
    Context ctx;
    for (const auto &w : split_whitespace(text)) {
        ctx.push_back(model_->vocab().id(w));
    }
    return ctx;
}

std::string NgramBackend::detokenize(std::span<const TokenId> tokens) const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += model_->vocab().word(tokens[i]);
    }
    return out;
}

} // namespace preadd
