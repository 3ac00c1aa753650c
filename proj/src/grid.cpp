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

#include "persal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "persal/error.hpp"

namespace persal {

namespace {

void require_nonempty(const SaliencyGrid& g) {
  if (g.empty()) throw Error(ErrorCode::ZeroDim, "grid is empty");
}

}  // namespace

SaliencyGrid::SaliencyGrid(std::size_t height, std::size_t width)
    : SaliencyGrid(height, width, std::vector<double>(height * width, 0.0)) {}

SaliencyGrid::SaliencyGrid(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height == 0 || width == 0) {
    throw Error(ErrorCode::ZeroDim, "grid dimensions must be positive");
  }
  if (values_.size() != height * width) {
    throw Error(ErrorCode::DimMismatch,
                "grid of " + std::to_string(height) + "x" + std::to_string(width) + " needs " +
                    std::to_string(height * width) + " values, got " +
                    std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "grid values must be finite and nonnegative");
    }
  }
}

double SaliencyGrid::sum() const noexcept {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

void SaliencyGrid::mark_normalized() {
  const double s = sum();
  if (std::abs(s - 1.0) > kNormalizedTolerance) {
    throw Error(ErrorCode::NotNormalized, "pixel-sum " + std::to_string(s) + " is not 1");
  }
  normalized_ = true;
}

SaliencyGrid minmax_normalize(const SaliencyGrid& g, bool* was_constant) {
  require_nonempty(g);
  const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
  const double min = *lo;
  const double range = *hi - min;
  if (was_constant) *was_constant = !(range > 0.0);
  if (!(range > 0.0)) return SaliencyGrid(g.height(), g.width());

  std::vector<double> out(g.size());
  std::transform(g.values().begin(), g.values().end(), out.begin(),
                 [&](double v) { return (v - min) / range; });
  // Pin the extremes so rounding cannot push them outside [0,1].
  *(out.begin() + (lo - g.values().begin())) = 0.0;
  *(out.begin() + (hi - g.values().begin())) = 1.0;
  return SaliencyGrid(g.height(), g.width(), std::move(out));
}

SaliencyGrid softmax_normalize(const SaliencyGrid& g, double scale) {
  if (!std::isfinite(scale) || scale <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "softmax scale must be positive");
  }
  require_nonempty(g);
  const double peak = *std::max_element(g.values().begin(), g.values().end());
  std::vector<double> out(g.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(scale * (g.values()[i] - peak));
    total += out[i];
  }
  for (double& v : out) v /= total;
  SaliencyGrid result(g.height(), g.width(), std::move(out));
  result.mark_normalized();
  return result;
}

SaliencyGrid normalize_sum(const SaliencyGrid& g) {
  const double total = g.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "cannot normalize an all-zero grid");
  std::vector<double> out(g.values().begin(), g.values().end());
  for (double& v : out) v /= total;
  SaliencyGrid result(g.height(), g.width(), std::move(out));
  result.mark_normalized();
  return result;
}

namespace {

struct Tap {
  std::size_t lo;
  std::size_t hi;
  double frac;  // weight of hi
};

// Half-pixel-centre mapping of destination index to a pair of source taps.
Tap source_tap(std::size_t dst, std::size_t dst_len, std::size_t src_len) {
  const double ratio = static_cast<double>(src_len) / static_cast<double>(dst_len);
  double pos = (static_cast<double>(dst) + 0.5) * ratio - 0.5;
  pos = std::clamp(pos, 0.0, static_cast<double>(src_len - 1));
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, src_len - 1);
  return {lo, hi, pos - static_cast<double>(lo)};
}

}  // namespace

SaliencyGrid resample(const SaliencyGrid& g, std::size_t new_height, std::size_t new_width) {
  if (new_height == 0 || new_width == 0) {
    throw Error(ErrorCode::ZeroDim, "resample target dimensions must be positive");
  }
  require_nonempty(g);
  if (new_height == g.height() && new_width == g.width()) return g;

  std::vector<Tap> cols(new_width);
  for (std::size_t c = 0; c < new_width; ++c) cols[c] = source_tap(c, new_width, g.width());

  std::vector<double> out(new_height * new_width);
  for (std::size_t r = 0; r < new_height; ++r) {
    const Tap rt = source_tap(r, new_height, g.height());
    for (std::size_t c = 0; c < new_width; ++c) {
      const Tap& ct = cols[c];
      const double top = (1.0 - ct.frac) * g.at(rt.lo, ct.lo) + ct.frac * g.at(rt.lo, ct.hi);
      const double bottom = (1.0 - ct.frac) * g.at(rt.hi, ct.lo) + ct.frac * g.at(rt.hi, ct.hi);
      out[r * new_width + c] = (1.0 - rt.frac) * top + rt.frac * bottom;
    }
  }
  SaliencyGrid result(new_height, new_width, std::move(out));
  if (g.normalized()) return normalize_sum(result);
  return result;
}

GridStats stats(const SaliencyGrid& g) {
  GridStats s;
  if (g.empty()) return s;
  const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
  s.min = *lo;
  s.max = *hi;
  s.sum = g.sum();
  s.mean = s.sum / static_cast<double>(g.size());
  if (s.min == s.max) {
    s.mean = s.min;
    return s;
  }
  double sq = 0.0;
  for (double v : g.values()) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(g.size()));
  return s;
}

}  // namespace persal
