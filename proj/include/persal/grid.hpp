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
#include <vector>

namespace persal {

// Row-major, nonnegative, finite grid of saliency values. The normalized flag
// marks grids that are probability distributions (pixel-sum 1 within 1e-9).
class SaliencyGrid {
 public:
  SaliencyGrid() = default;
  // Zero-filled grid. Throws ZeroDim for an empty shape.
  SaliencyGrid(std::size_t height, std::size_t width);
  // Validates shape, finiteness and nonnegativity.
  SaliencyGrid(std::size_t height, std::size_t width, std::vector<double> values);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  bool normalized() const noexcept { return normalized_; }

  double at(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
  double& at(std::size_t row, std::size_t col) {
    normalized_ = false;
    return values_[row * width_ + col];
  }

  std::span<const double> values() const noexcept { return values_; }
  // Mutable access drops the normalized flag; callers re-establish it.
  std::span<double> mutable_values() noexcept {
    normalized_ = false;
    return values_;
  }

  double sum() const noexcept;
  bool same_shape(const SaliencyGrid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  // Sets the flag after checking |sum - 1| <= 1e-9. Throws NotNormalized.
  void mark_normalized();

  friend bool operator==(const SaliencyGrid&, const SaliencyGrid&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
  bool normalized_ = false;
};

struct GridStats {
  double min = 0.0;
  double max = 0.0;
  double sum = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

inline constexpr double kNormalizedTolerance = 1e-9;

// Affine rescale to [0,1]. A constant input yields the all-zeros grid and sets
// *was_constant (when given); this is a warning, not an error.
SaliencyGrid minmax_normalize(const SaliencyGrid& g, bool* was_constant = nullptr);

// exp(scale * x_i) / sum_j exp(scale * x_j). Output is flagged normalized.
SaliencyGrid softmax_normalize(const SaliencyGrid& g, double scale = 1.0);

// Bilinear resampling with half-pixel-centre alignment. Normalized inputs are
// renormalized to pixel-sum 1 afterwards. Throws ZeroDim.
SaliencyGrid resample(const SaliencyGrid& g, std::size_t new_height, std::size_t new_width);

// Divides by the pixel-sum. Throws ZeroMass for an all-zero grid.
SaliencyGrid normalize_sum(const SaliencyGrid& g);

GridStats stats(const SaliencyGrid& g);

}  // namespace persal
