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
#include "persal/groundtruth.hpp"
#include "test_util.hpp"

using namespace persal;
using persal::testing::max_abs_diff;
using persal::testing::random_grid;

namespace {

DetectionSet boxes(std::vector<Detection> dets, std::size_t w = 380, std::size_t h = 380) {
  DetectionSet s;
  s.image_id = "gt";
  s.image_width = w;
  s.image_height = h;
  s.detections = std::move(dets);
  return s;
}

const CategoryMapping& two_way() {
  static const CategoryMapping m({"liked", "other"}, {{1, 0}, {2, 1}});
  return m;
}

}  // namespace

TEST_CASE("pmap") {
  const PreferenceVector pv({"liked", "other"}, {0.8, 0.3});
  CHECK(pmap(boxes({}), two_way(), pv, 38, 38).sum() == 0.0);

  // 10-pixel cells: box [0,0,100,100] covers rows/cols 0..9.
  const SaliencyGrid one = pmap(boxes({{1, 0.2, {0, 0, 100, 100}}}), two_way(), pv, 38, 38);
  for (std::size_t r = 0; r < 38; ++r) {
    for (std::size_t c = 0; c < 38; ++c) CHECK(one.at(r, c) == ((r < 10 && c < 10) ? 0.8 : 0.0));
  }

  const SaliencyGrid two = pmap(boxes({{2, 1.0, {0, 0, 100, 100}}, {1, 1.0, {50, 50, 100, 100}}}),
                                two_way(), PreferenceVector({"liked", "other"}, {0.9, 0.3}), 38, 38);
  CHECK(two.at(7, 7) == 0.9);
  CHECK(two.at(0, 0) == 0.3);
  CHECK(two.at(12, 12) == 0.9);
  CHECK(two.at(20, 20) == 0.0);
}

TEST_CASE("pmap only takes values from the preference vector") {
  Rng rng(31);
  const PreferenceVector pv({"liked", "other"}, {0.7, 0.2});
  for (int trial = 0; trial < 50; ++trial) {
    DetectionSet s = boxes({});
    for (int k = 0; k < 5; ++k) {
      s.detections.push_back({1 + static_cast<int>(rng.below(2)), 1.0,
                              {rng.uniform(0, 300), rng.uniform(0, 300), rng.uniform(1, 80),
                               rng.uniform(1, 80)}});
    }
    s.validate();
    for (double v : pmap(s, two_way(), pv, 38, 38).values()) {
      CHECK((v == 0.0 || v == 0.7 || v == 0.2));
    }
  }
}

TEST_CASE("blend hand case") {
  const SaliencyGrid sal(2, 2, {1, 0, 0, 0});
  const SaliencyGrid pm(2, 2, {0, 0, 0, 1});
  const SaliencyGrid b = blend(sal, pm, GtWeights{});
  CHECK(b.values()[0] == doctest::Approx(0.06).epsilon(1e-15));
  CHECK(b.values()[3] == doctest::Approx(0.188).epsilon(1e-15));
  const SaliencyGrid mm = minmax_normalize(b);
  CHECK(mm.values()[0] == doctest::Approx(0.3191489361702127).epsilon(1e-14));
  CHECK(mm.values()[1] == 0.0);
  CHECK(mm.values()[3] == 1.0);
  CHECK_THROWS_AS(blend(sal, SaliencyGrid(1, 4), GtWeights{}), Error);
}

TEST_CASE("generate_psal degeneracy") {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const SaliencyGrid sal = random_grid(rng, 38, 38);
    const SaliencyGrid expected = softmax_normalize(minmax_normalize(sal));

    AnnotatedImage partial{sal, boxes({{1, 1.0, {20, 40, 150, 90}}, {2, 1.0, {200, 10, 60, 300}}})};
    partial.boxes.validate();
    const PreferenceVector zeros({"liked", "other"}, {0.0, 0.0});
    for (double alpha : {0.06, 0.3, 1.0}) {
      const GtWeights w = {alpha, (1 - alpha) * 0.5, 1 - alpha - (1 - alpha) * 0.5};
      CHECK(max_abs_diff(generate_psal(partial, two_way(), zeros, w), expected) <= 1e-9);
    }

    const AnnotatedImage full{sal, boxes({{1, 1.0, {0, 0, 380, 380}}})};
    const PreferenceVector ones({"liked", "other"}, {1.0, 1.0});
    CHECK(max_abs_diff(generate_psal(full, two_way(), ones, GtWeights{}), expected) <= 1e-9);
  }
}

TEST_CASE("generate_psal output contract") {
  Rng rng(41);
  const PreferenceVector pv({"liked", "other"}, {1.0, 0.4});
  const AnnotatedImage img{random_grid(rng, 60, 45),
                           boxes({{1, 1.0, {10, 10, 120, 200}}, {2, 1.0, {150, 150, 100, 100}}})};
  bool warned = true;
  const SaliencyGrid a = generate_psal(img, two_way(), pv, GtWeights{}, {}, &warned);
  CHECK_FALSE(warned);
  CHECK(a.height() == 38);
  CHECK(a.width() == 38);
  CHECK(a.normalized());
  CHECK(std::abs(a.sum() - 1.0) <= 1e-9);
  CHECK(generate_psal(img, two_way(), pv, GtWeights{}) == a);

  CHECK_THROWS_AS(generate_psal(img, two_way(), pv, GtWeights{0.5, 0.5, 0.5}), Error);

  const AnnotatedImage blank{SaliencyGrid(38, 38), boxes({})};
  const SaliencyGrid uniform = generate_psal(blank, two_way(), pv, GtWeights{}, {}, &warned);
  CHECK(warned);
  CHECK(uniform.values()[0] == doctest::Approx(1.0 / 1444.0));
}

TEST_CASE("center_prior") {
  Rng rng(43);
  const SaliencyGrid m = random_grid(rng, 5, 5);
  const std::vector<SaliencyGrid> one{m};
  CHECK(center_prior(one) == minmax_normalize(m));
  const std::vector<SaliencyGrid> twice{m, m};
  CHECK(max_abs_diff(center_prior(twice), minmax_normalize(m)) <= 1e-15);

  const std::vector<SaliencyGrid> opposite{SaliencyGrid(1, 2, {1, 0}), SaliencyGrid(1, 2, {0, 1})};
  bool warned = false;
  const SaliencyGrid flat = center_prior(opposite, &warned);
  CHECK(warned);
  CHECK(flat.sum() == 0.0);

  CHECK_THROWS_AS(center_prior(std::vector<SaliencyGrid>{}), Error);
  const std::vector<SaliencyGrid> mixed{SaliencyGrid(2, 2), SaliencyGrid(2, 3)};
  CHECK_THROWS_AS(center_prior(mixed), Error);
}
