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

// Vocabulary-wide numeric kernels used by every decoding step.
//
// Two implementations are kept side by side:
//   serial::  the straightforward single-loop reference, used by tests;
//   omp::     OpenMP-parallel versions used by the library.
//
// Reductions in omp:: split the vector into fixed kBlock-sized blocks and add
// the per-block partials in block order, so results do not depend on the
// number of threads. For n <= kBlock the two implementations are bit-identical.

#include <cstddef>
#include <span>

namespace preadd::kernels {

inline constexpr std::size_t kBlock = 8192;

namespace serial {

// max over finite entries, -inf when there are none.
double max_finite(std::span<const double> x);
// log(sum(exp(x))); -inf entries contribute nothing; -inf if all are -inf.
double logsumexp(std::span<const double> x);
// x[i] -= shift for finite entries.
void subtract(std::span<double> x, double shift);
// Finite entries below floor are raised to floor; -inf is left alone.
void clamp_floor(std::span<double> x, double floor);
// out[i] = base[i] + alpha * (prefixed[i] - base[i]); -inf if either input is -inf.
void affine_combine(std::span<const double> base, std::span<const double> prefixed, double alpha,
                    std::span<double> out);

} // namespace serial

namespace omp {

double max_finite(std::span<const double> x);
double logsumexp(std::span<const double> x);
void subtract(std::span<double> x, double shift);
void clamp_floor(std::span<double> x, double floor);
void affine_combine(std::span<const double> base, std::span<const double> prefixed, double alpha,
                    std::span<double> out);

} // namespace omp

using omp::affine_combine;
using omp::clamp_floor;
using omp::logsumexp;
using omp::max_finite;
using omp::subtract;

} // namespace preadd::kernels
