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

#include <algorithm>

#include "doctest.h"
#include "persal/error.hpp"
#include "persal/raster.hpp"
#include "persal/random.hpp"

using namespace persal;

namespace {

DetectionSet frame(std::vector<Detection> dets, std::size_t w = 300, std::size_t h = 300) {
  DetectionSet s;
  s.image_id = "f";
  s.image_width = w;
  s.image_height = h;
  s.detections = std::move(dets);
  return s;
}

}  // namespace

TEST_CASE("iou") {
  CHECK(iou({0, 0, 10, 10}, {0, 0, 10, 8}) == doctest::Approx(0.8));
  CHECK(iou({0, 0, 10, 10}, {10, 0, 10, 10}) == 0.0);
  CHECK(iou({0, 0, 10, 10}, {5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
}

TEST_CASE("nms") {
  const NmsConfig cfg{0.5, 0.45};
  SUBCASE("overlapping same-class boxes collapse to the most confident") {
    const DetectionSet out = nms(frame({{1, 0.7, {0, 0, 10, 8}}, {1, 0.9, {0, 0, 10, 10}}}), cfg);
    REQUIRE(out.detections.size() == 1);
    CHECK(out.detections[0].confidence == 0.9);
  }
  SUBCASE("below threshold is dropped") {
    CHECK(nms(frame({{1, 0.4, {0, 0, 10, 10}}}), cfg).detections.empty());
    CHECK(nms(frame({{1, 0.5, {0, 0, 10, 10}}}), cfg).detections.size() == 1);
  }
  SUBCASE("different classes never suppress each other") {
    CHECK(nms(frame({{1, 0.9, {0, 0, 10, 10}}, {2, 0.8, {0, 0, 10, 10}}}), cfg).detections.size() == 2);
  }
  SUBCASE("output is in descending confidence") {
    const DetectionSet out =
        nms(frame({{1, 0.6, {0, 0, 5, 5}}, {2, 0.95, {50, 50, 5, 5}}, {3, 0.7, {90, 90, 5, 5}}}), cfg);
    REQUIRE(out.detections.size() == 3);
    CHECK(out.detections[0].confidence == 0.95);
    CHECK(out.detections[2].confidence == 0.6);
  }
  SUBCASE("presets and validation") {
    CHECK(NmsConfig::preset("voc").confidence_threshold == 0.6);
    CHECK(NmsConfig::preset("coco").confidence_threshold == 0.5);
    CHECK_THROWS_AS(NmsConfig::preset("imagenet"), Error);
    CHECK_THROWS_AS(nms(frame({}), NmsConfig{0.5, 0.0}), Error);
  }
}

TEST_CASE("nms is idempotent") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    DetectionSet s = frame({});
    for (int k = 0; k < 12; ++k) {
      s.detections.push_back({static_cast<int>(rng.below(3)), rng.uniform(),
                              {rng.uniform(0, 200), rng.uniform(0, 200), rng.uniform(10, 100),
                               rng.uniform(10, 100)}});
    }
    const NmsConfig cfg{rng.uniform(0, 0.6), rng.uniform(0.2, 0.8)};
    const DetectionSet once = nms(s, cfg);
    CHECK(nms(once, cfg) == once);
  }
}

TEST_CASE("rasterize") {
  SUBCASE("full cover") {
    const ClassTensor t = rasterize(frame({{2, 0.9, {0, 0, 300, 300}}}), 38, 38, 3);
    const auto ch = t.channel(2);
    CHECK(std::all_of(ch.begin(), ch.end(), [](double v) { return v == 0.9; }));
    CHECK(std::all_of(t.channel(0).begin(), t.channel(0).end(), [](double v) { return v == 0.0; }));
  }
  SUBCASE("overlap takes the max") {
    const ClassTensor t =
        rasterize(frame({{0, 0.6, {0, 0, 200, 200}}, {0, 0.8, {100, 100, 200, 200}}}), 38, 38, 1);
    CHECK(t.at(0, 19, 19) == 0.8);
    CHECK(t.at(0, 0, 0) == 0.6);
  }
  SUBCASE("half-open coverage of a quarter box") {
    const ClassTensor t = rasterize(frame({{0, 1.0, {0, 0, 150, 150}}}), 38, 38, 1);
    for (std::size_t r = 0; r < 38; ++r) {
      for (std::size_t c = 0; c < 38; ++c) {
        CHECK(t.at(0, r, c) == ((r <= 18 && c <= 18) ? 1.0 : 0.0));
      }
    }
  }
  SUBCASE("partial cell overlap counts") {
    // x in [1,2) pixels of a 38-pixel image lands in cell 1 only.
    const ClassTensor t = rasterize(frame({{0, 1.0, {1.2, 1.2, 0.5, 0.5}}}, 38, 38), 38, 38, 1);
    CHECK(t.at(0, 1, 1) == 1.0);
    CHECK(t.at(0, 0, 0) == 0.0);
    CHECK(t.at(0, 2, 2) == 0.0);
  }
  SUBCASE("category range") {
    CHECK_THROWS_AS(rasterize(frame({{5, 1.0, {0, 0, 1, 1}}}), 38, 38, 5), Error);
  }
}

TEST_CASE("rasterize scales linearly with confidence") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    DetectionSet s = frame({});
    for (int k = 0; k < 6; ++k) {
      s.detections.push_back({0, rng.uniform(0.1, 1.0),
                              {rng.uniform(0, 250), rng.uniform(0, 250), rng.uniform(5, 120),
                               rng.uniform(5, 120)}});
    }
    s.validate();
    const double c = 0.5;  // power of two keeps the products exact
    DetectionSet scaled = s;
    for (Detection& d : scaled.detections) d.confidence *= c;
    const ClassTensor a = rasterize(s, 38, 38, 1);
    const ClassTensor b = rasterize(scaled, 38, 38, 1);
    for (std::size_t i = 0; i < 38 * 38; ++i) CHECK(b.channel(0)[i] == c * a.channel(0)[i]);
  }
}

TEST_CASE("map_to_super") {
  // channels: 0 cat, 1 dog, 2 car
  ClassTensor t(2, 2, 3);
  t.at(0, 0, 0) = 0.9;
  t.at(1, 0, 0) = 0.6;
  t.at(2, 1, 1) = 0.7;
  const CategoryMapping mapping({"animal", "vehicle"}, {{0, 0}, {1, 0}, {2, 1}});

  const ClassTensor out = map_to_super(t, mapping, pad_to_channels(PreferenceVector({"animal", "vehicle"}, {0.5, 1.0})));
  CHECK(out.n_channels() == kMaxSuperCategories);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.45));
  CHECK(out.at(1, 1, 1) == 0.7);  // single member, weight 1: identity
  for (std::size_t ch = 2; ch < kMaxSuperCategories; ++ch) {
    for (double v : out.channel(ch)) CHECK(v == 0.0);
  }

  const ClassTensor muted = map_to_super(t, mapping, PreferenceVector({"animal", "vehicle"}, {0.0, 1.0}));
  for (double v : muted.channel(0)) CHECK(v == 0.0);

  const CategoryMapping too_wide({"a"}, {{3, 0}});
  try {
    map_to_super(t, too_wide, PreferenceVector({"a"}, {1.0}));
    FAIL("expected ChannelMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ChannelMismatch);
  }
}

TEST_CASE("map_to_super properties") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    ClassTensor t(6, 6, 4);
    for (std::size_t ch = 0; ch < 4; ++ch) {
      for (double& v : t.channel(ch)) v = rng.uniform() < 0.5 ? rng.uniform() : 0.0;
    }
    const CategoryMapping m({"x", "y"}, {{0, 0}, {1, 0}, {2, 0}, {3, 1}});
    const double wx = rng.uniform();
    const double wy = rng.uniform();
    const ClassTensor base = map_to_super(t, m, PreferenceVector({"x", "y"}, {wx, wy}));
    const ClassTensor raised =
        map_to_super(t, m, PreferenceVector({"x", "y"}, {std::min(1.0, wx + 0.2), wy}));
    for (std::size_t i = 0; i < 36; ++i) {
      CHECK(raised.channel(0)[i] >= base.channel(0)[i]);
      CHECK(base.channel(0)[i] <= wx);
      CHECK(base.channel(1)[i] <= wy);
    }
    // Swapping two detailed channels inside "x" changes nothing.
    ClassTensor swapped = t;
    for (std::size_t i = 0; i < 36; ++i) std::swap(swapped.channel(0)[i], swapped.channel(2)[i]);
    CHECK(map_to_super(swapped, m, PreferenceVector({"x", "y"}, {wx, wy})) == base);
  }
}

TEST_CASE("preference_map") {
  ClassTensor t(1, 3, 20);
  CHECK(preference_map(t).sum() == 0.0);
  t.at(4, 0, 1) = 0.45;
  t.at(4, 0, 2) = 0.3;
  const SaliencyGrid one = preference_map(t);
  CHECK(one.values()[1] == 0.45);
  CHECK(one.values()[2] == 0.3);
  t.at(7, 0, 1) = 0.2;
  CHECK(preference_map(t).values()[1] == 0.45);
}
