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
#include <vector>

#include "doctest.h"
#include "oracle/lp_oracle.hpp"
#include "persal/error.hpp"
#include "persal/metrics.hpp"
#include "test_util.hpp"

using namespace persal;
using persal::testing::random_distribution;
using persal::testing::sparse_distribution;

namespace {

std::vector<double> vec(const SaliencyGrid& g) { return {g.values().begin(), g.values().end()}; }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

// Largest violation of the flow constraints, or of the reported cost.
double plan_violation(const EmdResult& r, const SaliencyGrid& p, const SaliencyGrid& q,
                      GroundDistance d) {
  std::vector<double> out(p.size(), 0.0);
  std::vector<double> in(q.size(), 0.0);
  double total = 0.0;
  double cost = 0.0;
  double worst = 0.0;
  for (const Flow& f : r.plan.flows) {
    worst = std::max(worst, -f.mass);
    out[f.from] += f.mass;
    in[f.to] += f.mass;
    total += f.mass;
    cost += f.mass * ground_distance(f.from, f.to, p.width(), d);
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    worst = std::max(worst, out[i] - p.values()[i]);
    worst = std::max(worst, in[i] - q.values()[i]);
  }
  worst = std::max(worst, std::abs(total - std::min(p.sum(), q.sum())));
  worst = std::max(worst, std::abs(cost - r.plan.total_cost));
  return worst;
}

}  // namespace

TEST_CASE("cc") {
  Rng rng(47);
  const SaliencyGrid p = random_distribution(rng, 6, 6);
  CHECK(cc(p, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cc(SaliencyGrid(1, 2, {1, 0}), SaliencyGrid(1, 2, {0, 1})) == doctest::Approx(-1.0));
  CHECK(cc(SaliencyGrid(1, 4, {1, 2, 3, 4}), SaliencyGrid(1, 4, {2, 4, 6, 8})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(code_of([] { cc(SaliencyGrid(2, 2, {1, 1, 1, 1}), SaliencyGrid(2, 2, {1, 0, 0, 0})); }) ==
        ErrorCode::ZeroVariance);
  CHECK(code_of([] { cc(SaliencyGrid(2, 2), SaliencyGrid(1, 4)); }) == ErrorCode::DimMismatch);
}

TEST_CASE("sim") {
  Rng rng(53);
  const SaliencyGrid p = random_distribution(rng, 5, 5);
  CHECK(sim(p, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sim(SaliencyGrid(1, 2, {1, 0}), SaliencyGrid(1, 2, {0, 1})) == 0.0);
  CHECK(sim(SaliencyGrid(1, 4, {0.5, 0.5, 0, 0}), SaliencyGrid(1, 4, {0.25, 0.25, 0.25, 0.25})) ==
        0.5);
  CHECK(code_of([] { sim(SaliencyGrid(1, 2, {1, 1}), SaliencyGrid(1, 2, {0.5, 0.5})); }) ==
        ErrorCode::NotNormalized);
}

TEST_CASE("kld_judd") {
  const SaliencyGrid uniform(1, 4, {0.25, 0.25, 0.25, 0.25});
  const SaliencyGrid spike(1, 4, {1, 0, 0, 0});
  CHECK(std::abs(kld_judd(uniform, uniform)) <= 1e-12);
  CHECK(kld_judd(uniform, spike) == doctest::Approx(1.3862943611198897).epsilon(1e-12));
  CHECK(kld_judd(spike, uniform) == doctest::Approx(25.646461234933255).epsilon(1e-10));
}

TEST_CASE("kld_plain") {
  const SaliencyGrid p(1, 2, {0.5, 0.5});
  CHECK(kld_plain(p, p) == 0.0);
  CHECK(kld_plain(p, SaliencyGrid(1, 2, {0.25, 0.75})) ==
        doctest::Approx(0.14384103622589042).epsilon(1e-12));
  CHECK(kld_plain(SaliencyGrid(1, 2, {1, 0}), p) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(code_of([&] { kld_plain(p, SaliencyGrid(1, 2, {1, 0})); }) == ErrorCode::UndefinedRatio);
}

TEST_CASE("emd examples") {
  Rng rng(59);
  const SaliencyGrid p = random_distribution(rng, 4, 4);
  const EmdResult same = emd(p, p);
  CHECK(same.value == 0.0);
  for (const Flow& f : same.plan.flows) CHECK(f.from == f.to);

  const SaliencyGrid a(2, 2, {1, 0, 0, 0});
  const SaliencyGrid b(2, 2, {0, 0, 0, 1});
  CHECK(emd(a, b).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(oracle::emd_lp(vec(a), vec(b), 2, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(emd(a, b, {32, GroundDistance::Manhattan}).value == doctest::Approx(2.0));

  const EmdResult penalty = emd(a, SaliencyGrid(2, 2));
  CHECK(penalty.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(penalty.plan.flows.empty());

  CHECK_THROWS_AS(emd(a, SaliencyGrid(1, 4)), Error);
  CHECK_THROWS_AS(emd(a, b, {0, GroundDistance::Euclidean}), Error);
}

TEST_CASE("emd matches the LP oracle") {
  Rng rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const bool sparse = trial % 2 == 1;
    const SaliencyGrid p = sparse ? sparse_distribution(rng, 3, 3) : random_distribution(rng, 3, 3);
    const SaliencyGrid q = sparse ? sparse_distribution(rng, 3, 3) : random_distribution(rng, 3, 3);
    for (GroundDistance d : {GroundDistance::Euclidean, GroundDistance::Manhattan}) {
      const EmdResult r = emd(p, q, {32, d});
      const double expected =
          oracle::emd_lp(vec(p), vec(q), 3, 3, d == GroundDistance::Manhattan);
      CHECK(std::abs(r.value - expected) <= 1e-6);
      CHECK(plan_violation(r, p, q, d) <= 1e-9);
    }
  }
}

TEST_CASE("emd matches the LP oracle with unequal mass") {
  Rng rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    const SaliencyGrid p = testing::random_grid(rng, 2, 3, 0.0, 0.5);
    const SaliencyGrid q = testing::random_grid(rng, 2, 3, 0.0, 0.3);
    const EmdResult r = emd(p, q);
    CHECK(std::abs(r.value - oracle::emd_lp(vec(p), vec(q), 2, 3)) <= 1e-6);
    CHECK(plan_violation(r, p, q, GroundDistance::Euclidean) <= 1e-9);
  }
}

TEST_CASE("emd metric properties") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const SaliencyGrid a = random_distribution(rng, 3, 3);
    const SaliencyGrid b = random_distribution(rng, 3, 3);
    const SaliencyGrid c = random_distribution(rng, 3, 3);
    const double ab = emd(a, b).value;
    CHECK(std::abs(ab - emd(b, a).value) <= 1e-9);
    CHECK(emd(a, c).value <= ab + emd(b, c).value + 1e-9);
  }
  for (std::size_t k = 1; k < 8; ++k) {
    std::vector<double> p(8 * 8, 0.0);
    std::vector<double> q(8 * 8, 0.0);
    p[3 * 8 + 0] = 1.0;
    q[3 * 8 + k] = 1.0;
    CHECK(std::abs(emd(SaliencyGrid(8, 8, p), SaliencyGrid(8, 8, q)).value - double(k)) <= 1e-9);
    std::vector<double> v(8 * 8, 0.0);
    v[k * 8 + 2] = 1.0;
    std::vector<double> top(8 * 8, 0.0);
    top[2] = 1.0;
    CHECK(std::abs(emd(SaliencyGrid(8, 8, top), SaliencyGrid(8, 8, v)).value - double(k)) <= 1e-9);
  }
}

TEST_CASE("emd at full working resolution") {
  Rng rng(73);
  const SaliencyGrid p = random_distribution(rng, 38, 38);
  const SaliencyGrid q = sparse_distribution(rng, 38, 38);
  const EmdResult r = emd(p, q);
  CHECK(r.height == 32);
  CHECK(r.width == 32);
  CHECK(r.value > 0.0);
  CHECK(std::isfinite(r.value));
  CHECK(emd(p, q).value == r.value);
}

TEST_CASE("ground distance names") {
  CHECK(parse_ground_distance("manhattan") == GroundDistance::Manhattan);
  CHECK(std::string(to_string(GroundDistance::Euclidean)) == "euclidean");
  CHECK_THROWS_AS(parse_ground_distance("chebyshev"), Error);
}

TEST_CASE("evaluate_batch") {
  Rng rng(79);
  const SaliencyGrid p = random_distribution(rng, 6, 6);
  std::vector<EvalPair> one{{"a", p, p}};
  const MetricReport r1 = evaluate_batch(one);
  CHECK(r1.means.cc == doctest::Approx(1.0));
  CHECK(r1.means.sim == doctest::Approx(1.0));
  CHECK(std::abs(r1.means.kld_judd) <= 1e-12);
  CHECK(r1.means.emd == 0.0);

  std::vector<EvalPair> pairs;
  for (int i = 0; i < 9; ++i) {
    pairs.push_back({"img" + std::to_string(i), sparse_distribution(rng, 6, 6),
                     random_distribution(rng, 6, 6)});
  }
  pairs.push_back({"flat", normalize_sum(SaliencyGrid(6, 6, std::vector<double>(36, 1.0))),
                   random_distribution(rng, 6, 6)});
  const MetricReport serial = evaluate_batch(pairs);
  const MetricReport threaded = evaluate_batch(pairs, {}, 4);
  REQUIRE(serial.images.size() == 10);
  CHECK(serial.counts.cc == 9);
  CHECK(serial.counts.cc_excluded == 1);
  CHECK(serial.counts.failed == 1);
  CHECK(serial.images[9].flags == std::vector<std::string>{"cc:ZeroVariance"});
  CHECK(serial.counts.sim == 10);
  double sum = 0.0;
  for (const PairMetrics& m : serial.images) sum += *m.sim;
  CHECK(serial.means.sim == doctest::Approx(sum / 10.0).epsilon(1e-15));
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(serial.images[i].id == threaded.images[i].id);
    CHECK(serial.images[i].emd == threaded.images[i].emd);
    CHECK(serial.images[i].cc == threaded.images[i].cc);
  }
  CHECK(serial.means.emd == threaded.means.emd);
}
