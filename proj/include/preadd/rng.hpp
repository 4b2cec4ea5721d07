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

#include <cstdint>
#include <string_view>

namespace preadd {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Counter-based generator: draw i returns splitmix64_mix(seed + (i + 1) * golden_gamma).
//
// This is SplitMix64 with its state written as (seed, counter). Output depends only
// on integer arithmetic, so streams are identical on every platform. Golden-output
// tests pin this algorithm; do not change it.
class CounterRng {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr CounterRng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

    constexpr std::uint64_t next_u64() noexcept {
        ++counter_;
        return splitmix64_mix(seed_ + counter_ * kGamma);
    }

    // Uniform in [0, 1) with 53 random bits.
    constexpr double next_unit() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t seed() const noexcept {
        return seed_;
    }
    constexpr std::uint64_t counter() const noexcept {
        return counter_;
    }

    // Independent stream for one prompt of a run: the outcome for a prompt depends only
    // on (run seed, prompt id), never on worker count or processing order.
    static constexpr CounterRng for_stream(std::uint64_t seed, std::string_view stream_id) noexcept {
        return CounterRng(splitmix64_mix(seed ^ fnv1a64(stream_id)));
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace preadd
