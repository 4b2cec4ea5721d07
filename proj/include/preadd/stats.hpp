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

#include <span>

namespace preadd::stats {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with dof degrees of freedom.
double student_t_cdf(double t, double dof);

struct TTestResult {
    double t = 0.0;
    double p_two_sided = 1.0;
    int dof = 0;
};

// Paired t-test on d_i = a_i - b_i with the n-1 standard deviation.
// Throws LengthMismatch, EmptyInput (n < 2) or DegenerateVariance (all d_i equal).
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

} // namespace preadd::stats
