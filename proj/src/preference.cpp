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

#include "persal/preference.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "persal/error.hpp"

namespace persal {

namespace {

constexpr std::array<CocoCategory, 80> kCoco = {{
    {1, "person", "person"},          {2, "bicycle", "vehicle"},
    {3, "car", "vehicle"},            {4, "motorcycle", "vehicle"},
    {5, "airplane", "vehicle"},       {6, "bus", "vehicle"},
    {7, "train", "vehicle"},          {8, "truck", "vehicle"},
    {9, "boat", "vehicle"},           {10, "traffic light", "outdoor"},
    {11, "fire hydrant", "outdoor"},  {13, "stop sign", "outdoor"},
    {14, "parking meter", "outdoor"}, {15, "bench", "outdoor"},
    {16, "bird", "animal"},           {17, "cat", "animal"},
    {18, "dog", "animal"},            {19, "horse", "animal"},
    {20, "sheep", "animal"},          {21, "cow", "animal"},
    {22, "elephant", "animal"},       {23, "bear", "animal"},
    {24, "zebra", "animal"},          {25, "giraffe", "animal"},
    {27, "backpack", "accessory"},    {28, "umbrella", "accessory"},
    {31, "handbag", "accessory"},     {32, "tie", "accessory"},
    {33, "suitcase", "accessory"},    {34, "frisbee", "sports"},
    {35, "skis", "sports"},           {36, "snowboard", "sports"},
    {37, "sports ball", "sports"},    {38, "kite", "sports"},
    {39, "baseball bat", "sports"},   {40, "baseball glove", "sports"},
    {41, "skateboard", "sports"},     {42, "surfboard", "sports"},
    {43, "tennis racket", "sports"},  {44, "bottle", "kitchen"},
    {46, "wine glass", "kitchen"},    {47, "cup", "kitchen"},
    {48, "fork", "kitchen"},          {49, "knife", "kitchen"},
    {50, "spoon", "kitchen"},         {51, "bowl", "kitchen"},
    {52, "banana", "food"},           {53, "apple", "food"},
    {54, "sandwich", "food"},         {55, "orange", "food"},
    {56, "broccoli", "food"},         {57, "carrot", "food"},
    {58, "hot dog", "food"},          {59, "pizza", "food"},
    {60, "donut", "food"},            {61, "cake", "food"},
    {62, "chair", "furniture"},       {63, "couch", "furniture"},
    {64, "potted plant", "furniture"}, {65, "bed", "furniture"},
    {67, "dining table", "furniture"}, {70, "toilet", "furniture"},
    {72, "tv", "electronic"},         {73, "laptop", "electronic"},
    {74, "mouse", "electronic"},      {75, "remote", "electronic"},
    {76, "keyboard", "electronic"},   {77, "cell phone", "electronic"},
    {78, "microwave", "appliance"},   {79, "oven", "appliance"},
    {80, "toaster", "appliance"},     {81, "sink", "appliance"},
    {82, "refrigerator", "appliance"}, {84, "book", "indoor"},
    {85, "clock", "indoor"},          {86, "vase", "indoor"},
    {87, "scissors", "indoor"},       {88, "teddy bear", "indoor"},
    {89, "hair drier", "indoor"},     {90, "toothbrush", "indoor"},
}};

constexpr std::array<const char*, 12> kCocoSuper = {
    "outdoor", "food",     "indoor",    "appliance", "sports",     "person",
    "animal",  "vehicle",  "furniture", "accessory", "electronic", "kitchen"};

constexpr std::int64_t kSecondsPerDay = 86400;

}  // namespace

void DetectionSet::validate() {
  if (image_width == 0 || image_height == 0) {
    throw Error(ErrorCode::InvalidArgument, "image '" + image_id + "' has zero dimensions");
  }
  const auto iw = static_cast<double>(image_width);
  const auto ih = static_cast<double>(image_height);
  for (Detection& d : detections) {
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "confidence outside [0,1] in image '" + image_id + "'");
    }
    const Box& b = d.box;
    if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
        !std::isfinite(b.h) || b.w < 0.0 || b.h < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "malformed box in image '" + image_id + "'");
    }
    const double x0 = std::clamp(b.x, 0.0, iw);
    const double y0 = std::clamp(b.y, 0.0, ih);
    const double x1 = std::clamp(b.x + b.w, 0.0, iw);
    const double y1 = std::clamp(b.y + b.h, 0.0, ih);
    d.box = {x0, y0, x1 - x0, y1 - y0};
  }
}

CategoryMapping::CategoryMapping(std::vector<std::string> super_names,
                                 std::map<int, std::size_t> entries,
                                 std::optional<std::size_t> catch_all)
    : super_names_(std::move(super_names)), entries_(std::move(entries)), catch_all_(catch_all) {
  if (super_names_.size() > kMaxSuperCategories) {
    throw Error(ErrorCode::TooManySuperCategories,
                std::to_string(super_names_.size()) + " super categories exceed the cap of " +
                    std::to_string(kMaxSuperCategories));
  }
  for (const auto& [id, index] : entries_) {
    if (index >= super_names_.size()) {
      throw Error(ErrorCode::OutOfRange, "category " + std::to_string(id) +
                                             " maps to super index " + std::to_string(index));
    }
  }
  if (catch_all_ && *catch_all_ >= super_names_.size()) {
    throw Error(ErrorCode::OutOfRange, "catch_all index out of range");
  }
}

const CategoryMapping& CategoryMapping::coco_default() {
  static const CategoryMapping mapping = [] {
    std::vector<std::string> names(kCocoSuper.begin(), kCocoSuper.end());
    std::map<int, std::size_t> entries;
    for (const CocoCategory& c : kCoco) {
      const auto it = std::find_if(kCocoSuper.begin(), kCocoSuper.end(),
                                   [&](const char* s) { return std::string(s) == c.supercategory; });
      entries.emplace(c.id, static_cast<std::size_t>(it - kCocoSuper.begin()));
    }
    return CategoryMapping(std::move(names), std::move(entries));
  }();
  return mapping;
}

std::optional<std::size_t> CategoryMapping::lookup(int category_id) const {
  if (const auto it = entries_.find(category_id); it != entries_.end()) return it->second;
  return catch_all_;
}

std::size_t CategoryMapping::resolve(int category_id) const {
  if (const auto index = lookup(category_id)) return *index;
  throw Error(ErrorCode::UnmappedCategory,
              "category " + std::to_string(category_id) + " has no super category");
}

std::span<const CocoCategory> coco_categories() noexcept { return kCoco; }

std::optional<int> coco_category_id(const std::string& name) {
  for (const CocoCategory& c : kCoco) {
    if (name == c.name) return c.id;
  }
  return std::nullopt;
}

PreferenceVector::PreferenceVector(std::vector<std::string> names, std::vector<double> weights)
    : names_(std::move(names)), weights_(std::move(weights)) {
  if (names_.size() != weights_.size()) {
    throw Error(ErrorCode::InvalidArgument, "preference names and weights differ in length");
  }
  if (weights_.size() > kMaxSuperCategories) {
    throw Error(ErrorCode::TooManySuperCategories,
                std::to_string(weights_.size()) + " preferences exceed the cap of " +
                    std::to_string(kMaxSuperCategories));
  }
  for (double w : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "preference weights must lie in [0,1]");
    }
  }
}

PreferenceVector extract_preferences(std::span<const DetectionSet> history,
                                     const CategoryMapping& mapping, std::int64_t now,
                                     int window_days) {
  if (window_days <= 0) throw Error(ErrorCode::InvalidArgument, "window_days must be positive");
  const std::int64_t oldest = now - static_cast<std::int64_t>(window_days) * kSecondsPerDay;

  std::vector<double> sums(mapping.n_super(), 0.0);
  for (const DetectionSet& set : history) {
    if (set.timestamp && (*set.timestamp < oldest || *set.timestamp > now)) continue;
    for (const Detection& d : set.detections) sums[mapping.resolve(d.category_id)] += d.confidence;
  }

  const double peak = sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
  if (peak > 0.0) {
    for (double& s : sums) s /= peak;
  }
  return PreferenceVector(mapping.super_names(), std::move(sums));
}

PreferenceVector from_ratings(std::vector<std::string> names, std::span<const int> ratings) {
  if (names.size() != ratings.size()) {
    throw Error(ErrorCode::InvalidArgument, "ratings and names differ in length");
  }
  std::vector<double> weights;
  weights.reserve(ratings.size());
  for (int r : ratings) {
    if (r < 0 || r > 10) {
      throw Error(ErrorCode::RatingOutOfRange, "rating " + std::to_string(r) + " outside 0..10");
    }
    weights.push_back(r / 10.0);
  }
  return PreferenceVector(std::move(names), std::move(weights));
}

PreferenceVector pad_to_channels(const PreferenceVector& pvec, std::size_t channels) {
  if (pvec.size() > channels) {
    throw Error(ErrorCode::TooManySuperCategories,
                std::to_string(pvec.size()) + " preferences do not fit " +
                    std::to_string(channels) + " channels");
  }
  std::vector<std::string> names = pvec.names();
  std::vector<double> weights = pvec.weights();
  for (std::size_t i = pvec.size(); i < channels; ++i) {
    names.push_back("__pad_" + std::to_string(i));
    weights.push_back(0.0);
  }
  return PreferenceVector(std::move(names), std::move(weights));
}

}  // namespace persal
