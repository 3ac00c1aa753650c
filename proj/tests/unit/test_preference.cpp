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
#include "persal/preference.hpp"
#include "persal/random.hpp"

using namespace persal;

namespace {

constexpr int kCat = 17;
constexpr int kDog = 18;
constexpr int kCar = 3;

CategoryMapping animal_vehicle() {
  return CategoryMapping({"animal", "vehicle"}, {{kCat, 0}, {kDog, 0}, {kCar, 1}});
}

DetectionSet image(std::vector<Detection> dets, std::optional<std::int64_t> ts = std::nullopt) {
  DetectionSet s;
  s.image_id = "img";
  s.image_width = 100;
  s.image_height = 100;
  s.timestamp = ts;
  s.detections = std::move(dets);
  return s;
}

Detection det(int cat, double conf) { return {cat, conf, {10, 10, 20, 20}}; }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;  // unreachable in passing tests
}

}  // namespace

TEST_CASE("extract_preferences sums confidences and max-normalizes") {
  const std::vector<DetectionSet> history{image({det(kCat, 0.9), det(kCat, 0.6), det(kCar, 0.8)})};
  const PreferenceVector p = extract_preferences(history, animal_vehicle(), 0);
  REQUIRE(p.size() == 2);
  CHECK(p.names()[0] == "animal");
  CHECK(p.weight(0) == 1.0);
  CHECK(p.weight(1) == doctest::Approx(0.8 / 1.5).epsilon(1e-15));
}

TEST_CASE("extract_preferences edge cases") {
  CHECK(extract_preferences({}, animal_vehicle(), 0).weights() == std::vector<double>{0.0, 0.0});

  const std::vector<DetectionSet> half{image({det(kCat, 0.45), det(kCat, 0.3), det(kCar, 0.4)})};
  const std::vector<DetectionSet> full{image({det(kCat, 0.9), det(kCat, 0.6), det(kCar, 0.8)})};
  CHECK(extract_preferences(half, animal_vehicle(), 0) == extract_preferences(full, animal_vehicle(), 0));

  const std::vector<DetectionSet> unmapped{image({det(1, 0.9)})};
  CHECK(code_of([&] { extract_preferences(unmapped, animal_vehicle(), 0); }) ==
        ErrorCode::UnmappedCategory);
  const CategoryMapping with_catch_all({"animal", "others"}, {{kCat, 0}}, 1);
  CHECK(extract_preferences(unmapped, with_catch_all, 0).weights() == std::vector<double>{0.0, 1.0});

  CHECK(code_of([&] { extract_preferences(full, animal_vehicle(), 0, 0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("recency window") {
  const std::int64_t now = 1'700'000'000;
  const std::int64_t day = 86400;
  const std::vector<DetectionSet> history{
      image({det(kCat, 1.0)}, now - 10 * day),
      image({det(kCar, 1.0), det(kCar, 1.0)}, now - 91 * day),  // stale
      image({det(kCar, 0.5)}),                                 // no timestamp: counts
      image({det(kCar, 1.0)}, now + day),                       // future: ignored
  };
  const PreferenceVector p = extract_preferences(history, animal_vehicle(), now, 90);
  CHECK(p.weights() == std::vector<double>{1.0, 0.5});
  // Window edges are inclusive.
  const std::vector<DetectionSet> edge{image({det(kCar, 1.0)}, now - 90 * day)};
  CHECK(extract_preferences(edge, animal_vehicle(), now, 90).weight(1) == 1.0);
}

TEST_CASE("preference monotonicity") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DetectionSet> history(1, image({}));
    for (int k = 0; k < 5; ++k) {
      history[0].detections.push_back(det(rng.below(2) ? kCat : kCar, rng.uniform(0.1, 1.0)));
    }
    const PreferenceVector before = extract_preferences(history, animal_vehicle(), 0);
    history[0].detections.push_back(det(kCat, rng.uniform(0.1, 1.0)));
    const PreferenceVector after = extract_preferences(history, animal_vehicle(), 0);
    // If animal was already the argmax it stays so; weight of animal never drops.
    if (before.weight(0) == 1.0) CHECK(after.weight(0) == 1.0);
    CHECK(after.weight(0) >= before.weight(0));
  }
}

TEST_CASE("from_ratings") {
  const std::vector<int> a{10, 8, 2};
  CHECK(from_ratings({"cat", "car", "others"}, a).weights() == std::vector<double>{1.0, 0.8, 0.2});
  const std::vector<int> b{10, 8, 5, 3};
  CHECK(from_ratings({"keyboard", "food", "person", "others"}, b).weights() ==
        std::vector<double>{1.0, 0.8, 0.5, 0.3});
  const std::vector<int> zero{0, 0};
  CHECK(from_ratings({"a", "b"}, zero).weights() == std::vector<double>{0.0, 0.0});
  const std::vector<int> bad{11};
  CHECK(code_of([&] { from_ratings({"a"}, bad); }) == ErrorCode::RatingOutOfRange);
  const std::vector<int> negative{-1};
  CHECK(code_of([&] { from_ratings({"a"}, negative); }) == ErrorCode::RatingOutOfRange);
}

TEST_CASE("pad_to_channels") {
  const PreferenceVector p({"person", "non-human"}, {1.0, 0.05});
  const PreferenceVector padded = pad_to_channels(p);
  REQUIRE(padded.size() == 20);
  CHECK(padded.weight(0) == 1.0);
  CHECK(padded.weight(1) == 0.05);
  for (std::size_t i = 2; i < 20; ++i) CHECK(padded.weight(i) == 0.0);
  CHECK(padded.names()[5] == "__pad_5");
  CHECK(pad_to_channels(padded) == padded);
  CHECK(code_of([&] { pad_to_channels(p, 1); }) == ErrorCode::TooManySuperCategories);

  std::vector<std::string> names(21, "x");
  std::vector<double> weights(21, 0.5);
  CHECK(code_of([&] { PreferenceVector(names, weights); }) == ErrorCode::TooManySuperCategories);
}

TEST_CASE("preference vector validates weights") {
  CHECK_THROWS_AS(PreferenceVector({"a"}, {1.5}), Error);
  CHECK_THROWS_AS(PreferenceVector({"a", "b"}, {0.5}), Error);
}

TEST_CASE("category mapping") {
  CHECK_THROWS_AS(CategoryMapping({"a"}, {{1, 1}}), Error);
  CHECK_THROWS_AS(CategoryMapping({"a"}, {}, 3), Error);
  const CategoryMapping& coco = CategoryMapping::coco_default();
  REQUIRE(coco.n_super() == 12);
  CHECK(coco.super_names()[0] == "outdoor");
  CHECK(coco.super_names()[11] == "kitchen");
  CHECK(coco.entries().size() == 80);
  CHECK(coco.super_names()[coco.resolve(1)] == "person");
  CHECK(coco.super_names()[coco.resolve(17)] == "animal");
  CHECK(coco.super_names()[coco.resolve(76)] == "electronic");
  CHECK(coco.super_names()[coco.resolve(90)] == "indoor");
  CHECK_FALSE(coco.lookup(12).has_value());
  CHECK(coco_category_id("teddy bear") == 88);
  CHECK_FALSE(coco_category_id("unicorn").has_value());
}

TEST_CASE("detection set validation clamps boxes") {
  DetectionSet s = image({{1, 0.5, {-10, 90, 30, 30}}});
  s.validate();
  CHECK(s.detections[0].box == Box{0, 90, 20, 10});
  DetectionSet bad = image({{1, 1.5, {0, 0, 1, 1}}});
  CHECK_THROWS_AS(bad.validate(), Error);
}
