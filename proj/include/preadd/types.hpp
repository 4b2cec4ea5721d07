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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace preadd {

using TokenId = std::uint32_t;

// Lowest log-probability any entry may carry after normalization (nats).
inline constexpr double kLogProbFloor = -30.0;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Next-token log-probabilities over a backend vocabulary.
//
// Entries produced by normalize() lie in [kLogProbFloor, 0]. Truncation is the
// only operation that writes -inf, marking tokens that were masked out and must
// never be sampled.
struct LogProbVector {
    std::vector<double> values;

    LogProbVector() = default;
    explicit LogProbVector(std::vector<double> v) : values(std::move(v)) {}

    std::size_t size() const noexcept {
        return values.size();
    }
    double operator[](std::size_t i) const {
        return values[i];
    }
    double prob(std::size_t i) const {
        return std::exp(values[i]);
    }
    std::span<const double> view() const noexcept {
        return values;
    }

    std::vector<double> probs() const {
        std::vector<double> out(values.size());
        std::transform(values.begin(), values.end(), out.begin(), [](double v) { return std::exp(v); });
        return out;
    }

    bool operator==(const LogProbVector &) const = default;
};

struct Context {
    std::vector<TokenId> tokens;

    Context() = default;
    explicit Context(std::vector<TokenId> t) : tokens(std::move(t)) {}

    std::size_t size() const noexcept {
        return tokens.size();
    }
    bool empty() const noexcept {
        return tokens.empty();
    }
    void push_back(TokenId id) {
        tokens.push_back(id);
    }

    // True when this context ends with `suffix`.
    bool ends_with(const Context &suffix) const {
        if (suffix.size() > size()) {
            return false;
        }
        return std::equal(suffix.tokens.begin(), suffix.tokens.end(), tokens.end() - static_cast<std::ptrdiff_t>(suffix.size()));
    }

    bool operator==(const Context &) const = default;
};

} // namespace preadd
