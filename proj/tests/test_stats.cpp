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

#include "preadd/stats.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace preadd;
using namespace preadd::testing;

TEST_CASE("paired t-test against the scipy oracle") {
    const auto pairs = load_json("oracles/ttest_pairs.json");
    REQUIRE(pairs.size() == 25);
    for (const auto &c : pairs) {
        const auto a = c["a"].get<std::vector<double>>();
        const auto b = c["b"].get<std::vector<double>>();
        const auto r = stats::paired_t_test(a, b);
        CHECK(r.t == doctest::Approx(c["t"].get<double>()).epsilon(1e-9));
        CHECK(std::abs(r.p_two_sided - c["p"].get<double>()) < 1e-6);
        CHECK(r.dof == c["dof"].get<int>());
    }
}

TEST_CASE("paired t-test edge cases") {
    const std::vector<double> a{1, 2, 3}, b{1, 1, 4};
    const auto r = stats::paired_t_test(a, b);
    CHECK(r.t == doctest::Approx(0.0));
    CHECK(r.p_two_sided == doctest::Approx(1.0));
    CHECK(r.dof == 2);

    const std::vector<double> c{2, 3, 4};
    CHECK(error_kind_of([&] { stats::paired_t_test(c, a); }) == ErrorKind::DegenerateVariance);
    CHECK(error_kind_of([&] { stats::paired_t_test(a, std::vector<double>{1, 2}); }) == ErrorKind::LengthMismatch);
    CHECK(error_kind_of([&] { stats::paired_t_test(std::vector<double>{1}, std::vector<double>{2}); }) ==
          ErrorKind::EmptyInput);
}

TEST_CASE("swapping arguments flips t and keeps p") {
    const std::vector<double> a{0.1, 0.4, 0.35, 0.8, 0.2}, b{0.2, 0.1, 0.3, 0.5, 0.25};
    const auto ab = stats::paired_t_test(a, b);
    const auto ba = stats::paired_t_test(b, a);
    CHECK(ab.t == doctest::Approx(-ba.t));
    CHECK(ab.p_two_sided == doctest::Approx(ba.p_two_sided));
}

TEST_CASE("student t cdf") {
    CHECK(stats::student_t_cdf(0.0, 5) == doctest::Approx(0.5));
    // dof 1 is the Cauchy distribution.
    CHECK(stats::student_t_cdf(1.0, 1) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(stats::student_t_cdf(-2.0, 7) + stats::student_t_cdf(2.0, 7) == doctest::Approx(1.0));
    CHECK(stats::incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(stats::incomplete_beta(2, 3, 1.0) == 1.0);
    CHECK(stats::incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3));
}
