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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace persal {

// Mapping-layer channel cap: at most this many super categories.
inline constexpr std::size_t kMaxSuperCategories = 20;
inline constexpr int kDefaultWindowDays = 90;

// Box in source-image pixels, top-left corner plus extent.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const noexcept { return w * h; }
  friend bool operator==(const Box&, const Box&) = default;
};

struct Detection {
  int category_id = 0;
  double confidence = 0.0;
  Box box;
  friend bool operator==(const Detection&, const Detection&) = default;
};

// Detections of one image. Boxes are clamped to [0,w]x[0,h] by validate().
struct DetectionSet {
  std::string image_id;
  std::size_t image_width = 0;
  std::size_t image_height = 0;
  std::optional<std::int64_t> timestamp;  // epoch seconds
  std::vector<Detection> detections;

  // Checks dimensions and confidences, then clamps every box to the image.
  // Throws InvalidArgument.
  void validate();
  friend bool operator==(const DetectionSet&, const DetectionSet&) = default;
};

// Many-to-one map from detailed category ids to super-category indices.
class CategoryMapping {
 public:
  CategoryMapping() = default;
  // Throws TooManySuperCategories or OutOfRange for an index >= n_super.
  CategoryMapping(std::vector<std::string> super_names, std::map<int, std::size_t> entries,
                  std::optional<std::size_t> catch_all = std::nullopt);

  // Twelve COCO super categories, ordered outdoor, food, indoor, appliance,
  // sports, person, animal, vehicle, furniture, accessory, electronic, kitchen.
  static const CategoryMapping& coco_default();

  std::size_t n_super() const noexcept { return super_names_.size(); }
  const std::vector<std::string>& super_names() const noexcept { return super_names_; }
  const std::map<int, std::size_t>& entries() const noexcept { return entries_; }
  std::optional<std::size_t> catch_all() const noexcept { return catch_all_; }

  friend bool operator==(const CategoryMapping&, const CategoryMapping&) = default;

  std::optional<std::size_t> lookup(int category_id) const;
  // Throws UnmappedCategory.
  std::size_t resolve(int category_id) const;

 private:
  std::vector<std::string> super_names_;
  std::map<int, std::size_t> entries_;
  std::optional<std::size_t> catch_all_;
};

struct CocoCategory {
  int id;
  const char* name;
  const char* supercategory;
};

// The 80 COCO detection categories (ids 1..90 with gaps).
std::span<const CocoCategory> coco_categories() noexcept;
// Detailed id for a COCO category name, if any.
std::optional<int> coco_category_id(const std::string& name);

class PreferenceVector {
 public:
  PreferenceVector() = default;
  // Throws InvalidArgument (weight outside [0,1] or length mismatch) or
  // TooManySuperCategories.
  PreferenceVector(std::vector<std::string> names, std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_.at(i); }

  friend bool operator==(const PreferenceVector&, const PreferenceVector&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> weights_;
};

// Sums detection confidences per super category over the sets whose
// timestamp lies in [now - window_days*86400, now] (sets without a timestamp
// always count), then divides by the largest sum. No confidence cutoff is
// applied here; histories are expected to be thresholded by the detector.
// Throws UnmappedCategory or InvalidArgument (window_days <= 0).
PreferenceVector extract_preferences(std::span<const DetectionSet> history,
                                     const CategoryMapping& mapping, std::int64_t now,
                                     int window_days = kDefaultWindowDays);

// weight_i = rating_i / 10. Throws RatingOutOfRange.
PreferenceVector from_ratings(std::vector<std::string> names, std::span<const int> ratings);

// Appends zero weights with "__pad_<i>" names. Throws TooManySuperCategories.
PreferenceVector pad_to_channels(const PreferenceVector& pvec,
                                 std::size_t channels = kMaxSuperCategories);

}  // namespace persal
