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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "persal/grid.hpp"
#include "persal/preference.hpp"

namespace persal {

inline constexpr std::size_t kPredictionGridSize = 38;

struct NmsConfig {
  double confidence_threshold = 0.5;
  double iou_threshold = 0.45;

  // "voc" -> 0.6, "coco" -> 0.5. Throws InvalidArgument for other names.
  static NmsConfig preset(std::string_view dataset);
  // Throws InvalidArgument.
  void validate() const;
};

double iou(const Box& a, const Box& b) noexcept;

// Drops detections below the confidence threshold, then greedily keeps the
// highest-confidence box of each overlapping same-category cluster. Output is
// ordered by descending confidence (stable for ties).
DetectionSet nms(const DetectionSet& dets, const NmsConfig& cfg);

// Half-open block of grid cells [row_begin,row_end) x [col_begin,col_end).
struct CellBlock {
  std::size_t row_begin = 0;
  std::size_t row_end = 0;
  std::size_t col_begin = 0;
  std::size_t col_end = 0;
};

// Cells whose rectangle overlaps the scaled box with positive area. Boxes are
// scaled by grid_w/image_w and grid_h/image_h. Empty for zero-area boxes.
std::optional<CellBlock> covered_cells(const Box& box, std::size_t image_width,
                                       std::size_t image_height, std::size_t grid_height,
                                       std::size_t grid_width);

// H x W x N stack of confidence grids, one channel per category.
class ClassTensor {
 public:
  ClassTensor() = default;
  ClassTensor(std::size_t height, std::size_t width, std::size_t n_channels);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t n_channels() const noexcept { return n_channels_; }

  std::span<const double> channel(std::size_t ch) const {
    return {values_.data() + ch * plane(), plane()};
  }
  std::span<double> channel(std::size_t ch) { return {values_.data() + ch * plane(), plane()}; }

  double at(std::size_t ch, std::size_t row, std::size_t col) const {
    return values_[ch * plane() + row * width_ + col];
  }
  double& at(std::size_t ch, std::size_t row, std::size_t col) {
    return values_[ch * plane() + row * width_ + col];
  }

  friend bool operator==(const ClassTensor&, const ClassTensor&) = default;

 private:
  std::size_t plane() const noexcept { return height_ * width_; }

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t n_channels_ = 0;
  std::vector<double> values_;
};

// Channel c, cell (r,k) = max confidence over detections of category c whose
// box covers the cell. Throws CategoryOutOfRange or ZeroDim.
ClassTensor rasterize(const DetectionSet& dets, std::size_t grid_height, std::size_t grid_width,
                      std::size_t n_classes);

// Mapping layer: super channel i = max over member channels j of
// (channel_j * pvec[i]). Always returns kMaxSuperCategories channels.
// Throws ChannelMismatch when the mapping names a channel the tensor lacks,
// InvalidArgument when pvec is shorter than mapping.n_super().
ClassTensor map_to_super(const ClassTensor& t, const CategoryMapping& mapping,
                         const PreferenceVector& pvec);

// Per-cell max across channels.
SaliencyGrid preference_map(const ClassTensor& t_super);

}  // namespace persal
