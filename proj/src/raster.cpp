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

#include "persal/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "persal/error.hpp"

namespace persal {

NmsConfig NmsConfig::preset(std::string_view dataset) {
  if (dataset == "voc") return {0.6, 0.45};
  if (dataset == "coco") return {0.5, 0.45};
  throw Error(ErrorCode::InvalidArgument,
              "unknown threshold preset '" + std::string(dataset) + "' (expected voc or coco)");
}

void NmsConfig::validate() const {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "confidence threshold must lie in [0,1]");
  }
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "IoU threshold must lie in (0,1]");
  }
}

double iou(const Box& a, const Box& b) noexcept {
  const double ix = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  const double iy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

DetectionSet nms(const DetectionSet& dets, const NmsConfig& cfg) {
  cfg.validate();
  std::vector<Detection> candidates;
  for (const Detection& d : dets.detections) {
    if (d.confidence >= cfg.confidence_threshold) candidates.push_back(d);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });

  DetectionSet out = dets;
  out.detections.clear();
  for (const Detection& d : candidates) {
    const bool suppressed =
        std::any_of(out.detections.begin(), out.detections.end(), [&](const Detection& kept) {
          return kept.category_id == d.category_id && iou(kept.box, d.box) > cfg.iou_threshold;
        });
    if (!suppressed) out.detections.push_back(d);
  }
  return out;
}

std::optional<CellBlock> covered_cells(const Box& box, std::size_t image_width,
                                       std::size_t image_height, std::size_t grid_height,
                                       std::size_t grid_width) {
  if (image_width == 0 || image_height == 0) {
    throw Error(ErrorCode::InvalidArgument, "box refers to an image with zero dimensions");
  }
  const double gx0 = box.x * static_cast<double>(grid_width) / static_cast<double>(image_width);
  const double gx1 =
      (box.x + box.w) * static_cast<double>(grid_width) / static_cast<double>(image_width);
  const double gy0 = box.y * static_cast<double>(grid_height) / static_cast<double>(image_height);
  const double gy1 =
      (box.y + box.h) * static_cast<double>(grid_height) / static_cast<double>(image_height);
  const auto clamp_index = [](double v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n)));
  };
  CellBlock block;
  block.col_begin = clamp_index(std::floor(gx0), grid_width);
  block.col_end = clamp_index(std::ceil(gx1), grid_width);
  block.row_begin = clamp_index(std::floor(gy0), grid_height);
  block.row_end = clamp_index(std::ceil(gy1), grid_height);
  if (!(gx1 > gx0) || !(gy1 > gy0) || block.col_begin >= block.col_end ||
      block.row_begin >= block.row_end) {
    return std::nullopt;
  }
  return block;
}

ClassTensor::ClassTensor(std::size_t height, std::size_t width, std::size_t n_channels)
    : height_(height), width_(width), n_channels_(n_channels),
      values_(height * width * n_channels, 0.0) {
  if (height == 0 || width == 0) throw Error(ErrorCode::ZeroDim, "tensor dimensions must be positive");
}

ClassTensor rasterize(const DetectionSet& dets, std::size_t grid_height, std::size_t grid_width,
                      std::size_t n_classes) {
  if (dets.image_width == 0 || dets.image_height == 0) {
    throw Error(ErrorCode::InvalidArgument, "detection set has zero image dimensions");
  }
  ClassTensor t(grid_height, grid_width, n_classes);
  for (const Detection& d : dets.detections) {
    if (d.category_id < 0 || static_cast<std::size_t>(d.category_id) >= n_classes) {
      throw Error(ErrorCode::CategoryOutOfRange, "category " + std::to_string(d.category_id) +
                                                     " outside " + std::to_string(n_classes) +
                                                     " classes");
    }
    const auto block =
        covered_cells(d.box, dets.image_width, dets.image_height, grid_height, grid_width);
    if (!block) continue;
    const auto ch = static_cast<std::size_t>(d.category_id);
    for (std::size_t r = block->row_begin; r < block->row_end; ++r) {
      for (std::size_t c = block->col_begin; c < block->col_end; ++c) {
        double& cell = t.at(ch, r, c);
        cell = std::max(cell, d.confidence);
      }
    }
  }
  return t;
}

ClassTensor map_to_super(const ClassTensor& t, const CategoryMapping& mapping,
                         const PreferenceVector& pvec) {
  if (pvec.size() < mapping.n_super()) {
    throw Error(ErrorCode::InvalidArgument,
                "preference vector has " + std::to_string(pvec.size()) + " weights for " +
                    std::to_string(mapping.n_super()) + " super categories");
  }
  for (const auto& [id, index] : mapping.entries()) {
    if (id < 0 || static_cast<std::size_t>(id) >= t.n_channels()) {
      throw Error(ErrorCode::ChannelMismatch, "mapping refers to channel " + std::to_string(id) +
                                                  " but the tensor has " +
                                                  std::to_string(t.n_channels()));
    }
  }

  ClassTensor out(t.height(), t.width(), kMaxSuperCategories);
  for (std::size_t ch = 0; ch < t.n_channels(); ++ch) {
    const auto super = mapping.lookup(static_cast<int>(ch));
    if (!super) continue;
    const double weight = pvec.weight(*super);
    const auto src = t.channel(ch);
    const auto dst = out.channel(*super);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::max(dst[i], src[i] * weight);
  }
  return out;
}

SaliencyGrid preference_map(const ClassTensor& t_super) {
  std::vector<double> out(t_super.height() * t_super.width(), 0.0);
  for (std::size_t ch = 0; ch < t_super.n_channels(); ++ch) {
    const auto src = t_super.channel(ch);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], src[i]);
  }
  return SaliencyGrid(t_super.height(), t_super.width(), std::move(out));
}

}  // namespace persal
