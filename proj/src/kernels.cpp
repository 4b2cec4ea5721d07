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

#include "preadd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <omp.h>

namespace preadd::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this many entries the parallel region costs more than it saves.
constexpr std::ptrdiff_t kParallelThreshold = 1 << 14;

inline double combine_one(double b, double p, double alpha) {
    if (std::isinf(b) || std::isinf(p)) {
        return -kInf;
    }
    return b + alpha * (p - b);
}

} // namespace

namespace serial {

double max_finite(std::span<const double> x) {
    double m = -kInf;
    for (double v : x) {
        if (std::isfinite(v) && v > m) {
            m = v;
        }
    }
    return m;
}

double logsumexp(std::span<const double> x) {
    const double m = max_finite(x);
    if (std::isinf(m)) {
        return -kInf;
    }
    double s = 0.0;
    for (double v : x) {
        if (std::isfinite(v)) {
            s += std::exp(v - m);
        }
    }
    return m + std::log(s);
}

void subtract(std::span<double> x, double shift) {
    for (double &v : x) {
        if (std::isfinite(v)) {
            v -= shift;
        }
    }
}

void clamp_floor(std::span<double> x, double floor) {
    for (double &v : x) {
        if (std::isfinite(v) && v < floor) {
            v = floor;
        }
    }
}

void affine_combine(std::span<const double> base, std::span<const double> prefixed, double alpha,
                    std::span<double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = combine_one(base[i], prefixed[i], alpha);
    }
}

} // namespace serial

namespace omp {

double max_finite(std::span<const double> x) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const double *data = x.data();
    double m = -kInf;
#pragma omp parallel for reduction(max : m) schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double v = data[i];
        if (std::isfinite(v) && v > m) {
            m = v;
        }
    }
    return m;
}

double logsumexp(std::span<const double> x) {
    const double m = max_finite(x);
    if (std::isinf(m)) {
        return -kInf;
    }
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const auto block = static_cast<std::ptrdiff_t>(kBlock);
    const std::ptrdiff_t nblocks = (n + block - 1) / block;
    std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
    const double *data = x.data();

#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
        const std::ptrdiff_t lo = b * block;
        const std::ptrdiff_t hi = std::min(n, lo + block);
        double s = 0.0;
        for (std::ptrdiff_t i = lo; i < hi; ++i) {
            if (std::isfinite(data[i])) {
                s += std::exp(data[i] - m);
            }
        }
        partial[static_cast<std::size_t>(b)] = s;
    }

    double s = 0.0;
    for (double p : partial) {
        s += p;
    }
    return m + std::log(s);
}

void subtract(std::span<double> x, double shift) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    double *data = x.data();
#pragma omp parallel for simd schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (std::isfinite(data[i])) {
            data[i] -= shift;
        }
    }
}

void clamp_floor(std::span<double> x, double floor) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    double *data = x.data();
#pragma omp parallel for simd schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (std::isfinite(data[i]) && data[i] < floor) {
            data[i] = floor;
        }
    }
}

void affine_combine(std::span<const double> base, std::span<const double> prefixed, double alpha,
                    std::span<double> out) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
    const double *b = base.data();
    const double *p = prefixed.data();
    double *o = out.data();
#pragma omp parallel for schedule(static) if (n > kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        o[i] = combine_one(b[i], p[i], alpha);
    }
}

} // namespace omp

} // namespace preadd::kernels
