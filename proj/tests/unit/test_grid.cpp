// Copyright 2026 The persal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "doctest.h"
#include "persal/error.hpp"
#include "persal/grid.hpp"
#include "test_util.hpp"

using namespace persal;
using persal::testing::max_abs_diff;
using persal::testing::random_grid;

TEST_CASE("grid construction validates shape and values") {
  CHECK_THROWS_AS(SaliencyGrid(0, 3), Error);
  CHECK_THROWS_AS(SaliencyGrid(2, 2, {1, 2, 3}), Error);
  CHECK_THROWS_AS(SaliencyGrid(1, 2, {1, -0.5}), Error);
  CHECK_THROWS_AS(SaliencyGrid(1, 2, {1, NAN}), Error);
  SaliencyGrid g(1, 2, {0.25, 0.5});
  CHECK_THROWS_AS(g.mark_normalized(), Error);
  SaliencyGrid ok(1, 2, {0.25, 0.75});
  ok.mark_normalized();
  CHECK(ok.normalized());
  ok.at(0, 0) = 0.5;
  CHECK_FALSE(ok.normalized());
}

TEST_CASE("minmax_normalize") {
  SUBCASE("affine rescale") {
    const SaliencyGrid out = minmax_normalize(SaliencyGrid(1, 3, {2, 4, 6}));
    CHECK(out.values()[0] == 0.0);
    CHECK(out.values()[1] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out.values()[2] == 1.0);
  }
  SUBCASE("positive scale does not matter") {
    Rng rng(3);
    const SaliencyGrid sal = random_grid(rng, 5, 7);
    std::vector<double> scaled(sal.values().begin(), sal.values().end());
    for (double& v : scaled) v *= 0.06;
    CHECK(max_abs_diff(minmax_normalize(SaliencyGrid(5, 7, scaled)), minmax_normalize(sal)) <= 1e-15);
  }
  SUBCASE("constant grid warns and returns zeros") {
    bool constant = false;
    const SaliencyGrid out = minmax_normalize(SaliencyGrid(1, 3, {5, 5, 5}), &constant);
    CHECK(constant);
    for (double v : out.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("softmax_normalize") {
  const SaliencyGrid even = softmax_normalize(SaliencyGrid(1, 2, {0, 0}));
  CHECK(even.values()[0] == doctest::Approx(0.5));
  CHECK(even.normalized());

  const SaliencyGrid two = softmax_normalize(SaliencyGrid(1, 2, {1, 0}));
  CHECK(two.values()[0] == doctest::Approx(0.7310585786300049).epsilon(1e-14));
  CHECK(two.values()[1] == doctest::Approx(0.2689414213699951).epsilon(1e-14));

  Rng rng(11);
  const SaliencyGrid g = softmax_normalize(random_grid(rng, 38, 38));
  CHECK(std::abs(g.sum() - 1.0) <= 1e-9);
  for (double v : g.values()) CHECK(v > 0.0);

  CHECK_THROWS_AS(softmax_normalize(g, 0.0), Error);
}

TEST_CASE("softmax preserves order") {
  Rng rng(5);
  const SaliencyGrid g = random_grid(rng, 6, 6);
  const SaliencyGrid s = softmax_normalize(g, 2.5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (g.values()[i] < g.values()[j]) CHECK(s.values()[i] < s.values()[j]);
    }
  }
}

TEST_CASE("normalization pipeline is positive-affine invariant") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const SaliencyGrid g = random_grid(rng, 8, 9);
    const double a = rng.uniform(0.1, 10.0);
    const double b = rng.uniform(0.0, 5.0);
    std::vector<double> t(g.values().begin(), g.values().end());
    for (double& v : t) v = a * v + b;
    const SaliencyGrid lhs = softmax_normalize(minmax_normalize(SaliencyGrid(8, 9, t)));
    const SaliencyGrid rhs = softmax_normalize(minmax_normalize(g));
    CHECK(max_abs_diff(lhs, rhs) <= 1e-9);
    for (double v : lhs.values()) CHECK((v > 0.0 && v <= 1.0));
  }
}

TEST_CASE("resample") {
  SUBCASE("identity dims are bitwise equal") {
    Rng rng(1);
    const SaliencyGrid g = random_grid(rng, 4, 5);
    CHECK(resample(g, 4, 5) == g);
  }
  SUBCASE("1x1 extends to a uniform distribution") {
    SaliencyGrid one(1, 1, {1.0});
    one.mark_normalized();
    const SaliencyGrid out = resample(one, 3, 4);
    CHECK(out.normalized());
    for (double v : out.values()) CHECK(v == doctest::Approx(1.0 / 12));
  }
  SUBCASE("checkerboard upsampling") {
    const SaliencyGrid board(2, 2, {1, 0, 0, 1});
    // 4x4: destination centres map to source -0.25, 0.25, 0.75, 1.25 (clamped).
    const SaliencyGrid up = resample(board, 4, 4);
    CHECK(up.at(0, 0) == 1.0);
    CHECK(up.at(3, 3) == 1.0);
    CHECK(up.at(0, 3) == 0.0);
    CHECK(up.at(0, 1) == doctest::Approx(0.75));
    CHECK(up.at(1, 1) == doctest::Approx(0.625));  // 0.75*0.75 + 0.25*0.25
    // 6x6: destination (1,1) and (4,4) sit exactly on source centres.
    const SaliencyGrid up6 = resample(board, 6, 6);
    CHECK(up6.at(1, 1) == 1.0);
    CHECK(up6.at(4, 4) == 1.0);
    CHECK(up6.at(1, 4) == 0.0);
  }
  SUBCASE("mass preserved for normalized input") {
    Rng rng(8);
    const SaliencyGrid g = normalize_sum(random_grid(rng, 38, 38));
    CHECK(std::abs(resample(g, 32, 32).sum() - 1.0) <= 1e-9);
    CHECK(std::abs(resample(g, 50, 17).sum() - 1.0) <= 1e-9);
  }
  SUBCASE("zero dims") { CHECK_THROWS_AS(resample(SaliencyGrid(2, 2), 0, 3), Error); }
}

TEST_CASE("stats") {
  const GridStats two = stats(SaliencyGrid(1, 2, {0, 1}));
  CHECK(two.min == 0.0);
  CHECK(two.max == 1.0);
  CHECK(two.mean == 0.5);
  CHECK(stats(SaliencyGrid(2, 2, {3, 3, 3, 3})).stddev == 0.0);
  const GridStats four = stats(SaliencyGrid(2, 2, {1, 2, 3, 4}));
  CHECK(four.mean == 2.5);
  CHECK(four.sum == 10.0);
  CHECK(four.stddev == doctest::Approx(1.118033988749895).epsilon(1e-14));
}
