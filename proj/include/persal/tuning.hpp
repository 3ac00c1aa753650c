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
#include <span>
#include <string>
#include <vector>

#include "persal/groundtruth.hpp"

namespace persal {

// alpha, beta = (1-alpha)*f, gamma = (1-alpha)*(1-f). Weights are snapped to
// a 1e-12 grid so decimal inputs give the decimal weights back.
// Throws OutOfRange unless alpha and beta_fraction lie in [0,1].
GtWeights final_weights(double alpha, double beta_fraction);

struct SweepSpec {
  std::vector<double> alpha_grid{0.01, 0.02, 0.04, 0.06, 0.08, 0.10, 0.14, 0.20};
  std::vector<double> ratio_grid{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};  // beta fractions
  double fixed_alpha = 0.06;
  double fixed_beta_fraction = 0.8;  // beta:gamma = 0.8:0.2

  // Throws InvalidArgument.
  void validate() const;
};

struct SweepCandidate {
  GtWeights weights;
  double swept = 0.0;  // alpha or beta fraction, whichever was varied
  double mean_cc = 0.0;
  double mean_sim = 0.0;
  double objective = 0.0;  // mean_cc + mean_sim
  std::size_t scored = 0;  // images contributing to the means
  std::size_t cc_excluded = 0;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepCandidate> candidates;  // in grid order
  std::size_t best_index = 0;
  GtWeights best;
};

struct SweepInputs {
  std::span<const AnnotatedImage> dataset;
  std::span<const SaliencyGrid> labels;  // one normalized label per image
  const CategoryMapping& mapping;
  const PreferenceVector& pvec;
  GenerationOptions generation{};
  std::size_t jobs = 1;
};

// Varies alpha over spec.alpha_grid with beta:gamma fixed. The best candidate
// maximizes mean CC + mean SIM; ties go to the smaller alpha, then the larger
// beta. Images with undefined CC are left out of both means. Throws
// InvalidArgument when no candidate could be scored or inputs disagree.
SweepResult sweep_alpha(const SweepInputs& in, const SweepSpec& spec);

// Varies the beta fraction over spec.ratio_grid with alpha fixed.
SweepResult sweep_ratio(const SweepInputs& in, const SweepSpec& spec);

// Scores one weight triple against the labels.
SweepCandidate score_weights(const SweepInputs& in, const GtWeights& w);

struct SyntheticOptions {
  std::size_t n_images = 100;
  std::uint64_t seed = 0;
  std::size_t image_width = 300;
  std::size_t image_height = 300;
  std::size_t grid_height = kPredictionGridSize;
  std::size_t grid_width = kPredictionGridSize;
  std::size_t min_objects = 1;
  std::size_t max_objects = 4;
  // Detailed categories to draw boxes from (COCO ids by default).
  std::vector<int> categories{1, 3, 17, 18, 44, 62, 72};
  // Boxes of this category are kept away from the image centre; -1 = none.
  int off_center_category = -1;
  // Every image receives at least one box of this category; -1 = none.
  int required_category = -1;
};

// Random box layouts with smoothed, centre-biased random fixation maps.
// Deterministic for a given options value.
std::vector<AnnotatedImage> make_synthetic_dataset(const SyntheticOptions& options);

}  // namespace persal
