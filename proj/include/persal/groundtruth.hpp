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
#include <span>

#include "persal/grid.hpp"
#include "persal/preference.hpp"
#include "persal/raster.hpp"

namespace persal {

// Blend weights for fixation map, fixation-times-preference, and preference.
struct GtWeights {
  double alpha = 0.06;
  double beta = 0.752;
  double gamma = 0.188;

  // Throws InvalidArgument unless all weights are >= 0 and sum to 1 (1e-9).
  void validate() const;
  friend bool operator==(const GtWeights&, const GtWeights&) = default;
};

// Fixation map plus ground-truth object boxes (entering with confidence 1).
struct AnnotatedImage {
  SaliencyGrid sal;
  DetectionSet boxes;
};

struct GenerationOptions {
  std::size_t height = kPredictionGridSize;
  std::size_t width = kPredictionGridSize;
  double softmax_scale = 1.0;
};

// Cell value = max preference weight over ground-truth objects covering the
// cell, 0 where nothing does. Throws UnmappedCategory, InvalidArgument.
SaliencyGrid pmap(const DetectionSet& boxes, const CategoryMapping& mapping,
                  const PreferenceVector& pvec, std::size_t height, std::size_t width);

// alpha*sal + beta*sal*pmap + gamma*pmap, element-wise. Throws DimMismatch.
SaliencyGrid blend(const SaliencyGrid& sal, const SaliencyGrid& pref_map, const GtWeights& w);

// softmax(minmax(blend(minmax(sal), pMap))). The fixation map is resampled to
// the generation resolution first when needed. *was_constant reports a
// degenerate (constant) blend.
SaliencyGrid generate_psal(const AnnotatedImage& img, const CategoryMapping& mapping,
                           const PreferenceVector& pvec, const GtWeights& w,
                           const GenerationOptions& options = {}, bool* was_constant = nullptr);

// Element-wise sum of fixation maps, min-max normalized to [0,1].
// Throws EmptyList, DimMismatch.
SaliencyGrid center_prior(std::span<const SaliencyGrid> sals, bool* was_constant = nullptr);

}  // namespace persal
