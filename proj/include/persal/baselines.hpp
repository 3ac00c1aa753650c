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
#include <string>

#include "persal/grid.hpp"
#include "persal/preference.hpp"

namespace persal {

enum class BaselineKind { CenterPrior, Detection };

const char* to_string(BaselineKind kind) noexcept;
// Accepts "center_prior" / "center-prior" / "detection". Throws InvalidArgument.
BaselineKind parse_baseline_kind(const std::string& name);

struct BaselineConfig {
  BaselineKind kind = BaselineKind::Detection;
  std::uint64_t seed = 0;
  double confidence_threshold = 0.5;
};

// The prior divided by its pixel-sum. Throws ZeroMass.
SaliencyGrid center_prior_baseline(const SaliencyGrid& prior);

// Cell value = max over detections with confidence >= threshold covering the
// cell of confidence * preference weight, normalized to pixel-sum 1. When
// that map is all zero (nothing detected confidently enough), the result is
// an i.i.d. uniform(0,1) grid drawn from cfg.seed, normalized to sum 1, and
// *used_fallback is set. Throws UnmappedCategory, InvalidArgument.
SaliencyGrid detection_baseline(const DetectionSet& dets, const CategoryMapping& mapping,
                                const PreferenceVector& pvec, const BaselineConfig& cfg,
                                std::size_t height, std::size_t width,
                                bool* used_fallback = nullptr);

}  // namespace persal
