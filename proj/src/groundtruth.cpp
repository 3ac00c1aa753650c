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

#include "persal/groundtruth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "persal/error.hpp"

namespace persal {

void GtWeights::validate() const {
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "ground-truth weights must be nonnegative");
  }
  if (std::abs(alpha + beta + gamma - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "ground-truth weights must sum to 1");
  }
}

SaliencyGrid pmap(const DetectionSet& boxes, const CategoryMapping& mapping,
                  const PreferenceVector& pvec, std::size_t height, std::size_t width) {
  if (pvec.size() < mapping.n_super()) {
    throw Error(ErrorCode::InvalidArgument, "preference vector does not cover every super category");
  }
  SaliencyGrid out(height, width);
  if (boxes.detections.empty()) return out;
  if (boxes.image_width == 0 || boxes.image_height == 0) {
    throw Error(ErrorCode::InvalidArgument, "annotation has zero image dimensions");
  }
  for (const Detection& d : boxes.detections) {
    const double weight = pvec.weight(mapping.resolve(d.category_id));
    const auto block = covered_cells(d.box, boxes.image_width, boxes.image_height, height, width);
    if (!block) continue;
    for (std::size_t r = block->row_begin; r < block->row_end; ++r) {
      for (std::size_t c = block->col_begin; c < block->col_end; ++c) {
        double& cell = out.at(r, c);
        cell = std::max(cell, weight);
      }
    }
  }
  return out;
}

SaliencyGrid blend(const SaliencyGrid& sal, const SaliencyGrid& pref_map, const GtWeights& w) {
  if (!sal.same_shape(pref_map)) {
    throw Error(ErrorCode::DimMismatch, "fixation map and preference map differ in shape");
  }
  std::vector<double> out(sal.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = sal.values()[i];
    const double m = pref_map.values()[i];
    out[i] = w.alpha * s + w.beta * s * m + w.gamma * m;
  }
  return SaliencyGrid(sal.height(), sal.width(), std::move(out));
}

SaliencyGrid generate_psal(const AnnotatedImage& img, const CategoryMapping& mapping,
                           const PreferenceVector& pvec, const GtWeights& w,
                           const GenerationOptions& options, bool* was_constant) {
  w.validate();
  bool blank_sal = false;
  bool blank_blend = false;
  const SaliencyGrid sal =
      minmax_normalize(resample(img.sal, options.height, options.width), &blank_sal);
  const SaliencyGrid pm = pmap(img.boxes, mapping, pvec, options.height, options.width);
  SaliencyGrid out =
      softmax_normalize(minmax_normalize(blend(sal, pm, w), &blank_blend), options.softmax_scale);
  if (was_constant) *was_constant = blank_sal || blank_blend;
  return out;
}

SaliencyGrid center_prior(std::span<const SaliencyGrid> sals, bool* was_constant) {
  if (sals.empty()) throw Error(ErrorCode::EmptyList, "center prior needs at least one map");
  std::vector<double> total(sals.front().size(), 0.0);
  for (const SaliencyGrid& s : sals) {
    if (!s.same_shape(sals.front())) {
      throw Error(ErrorCode::DimMismatch, "fixation maps differ in shape");
    }
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += s.values()[i];
  }
  return minmax_normalize(
      SaliencyGrid(sals.front().height(), sals.front().width(), std::move(total)), was_constant);
}

}  // namespace persal
