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

#include "persal/baselines.hpp"

#include <algorithm>

#include "persal/error.hpp"
#include "persal/random.hpp"
#include "persal/raster.hpp"

namespace persal {

const char* to_string(BaselineKind kind) noexcept {
  return kind == BaselineKind::CenterPrior ? "center_prior" : "detection";
}

BaselineKind parse_baseline_kind(const std::string& name) {
  if (name == "center_prior" || name == "center-prior") return BaselineKind::CenterPrior;
  if (name == "detection") return BaselineKind::Detection;
  throw Error(ErrorCode::InvalidArgument,
              "unknown baseline '" + name + "' (expected center_prior or detection)");
}

SaliencyGrid center_prior_baseline(const SaliencyGrid& prior) { return normalize_sum(prior); }

SaliencyGrid detection_baseline(const DetectionSet& dets, const CategoryMapping& mapping,
                                const PreferenceVector& pvec, const BaselineConfig& cfg,
                                std::size_t height, std::size_t width, bool* used_fallback) {
  if (!(cfg.confidence_threshold >= 0.0 && cfg.confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "baseline threshold must lie in [0,1]");
  }
  if (pvec.size() < mapping.n_super()) {
    throw Error(ErrorCode::InvalidArgument, "preference vector does not cover every super category");
  }
  SaliencyGrid out(height, width);
  for (const Detection& d : dets.detections) {
    if (d.confidence < cfg.confidence_threshold) continue;
    const double value = d.confidence * pvec.weight(mapping.resolve(d.category_id));
    const auto block = covered_cells(d.box, dets.image_width, dets.image_height, height, width);
    if (!block) continue;
    for (std::size_t r = block->row_begin; r < block->row_end; ++r) {
      for (std::size_t c = block->col_begin; c < block->col_end; ++c) {
        double& cell = out.at(r, c);
        cell = std::max(cell, value);
      }
    }
  }

  const bool fallback = !(out.sum() > 0.0);
  if (used_fallback) *used_fallback = fallback;
  if (!fallback) return normalize_sum(out);

  Rng rng(cfg.seed);
  for (double& v : out.mutable_values()) v = rng.uniform();
  return normalize_sum(out);
}

}  // namespace persal
