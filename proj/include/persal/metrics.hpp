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
#include <string>
#include <vector>

#include "persal/grid.hpp"

namespace persal {

// Regularization constant of the Judd KL variant.
inline constexpr double kJuddEpsilon = 2.2204e-16;
// Pixel-sum tolerance for metrics that require distributions.
inline constexpr double kMetricSumTolerance = 1e-6;

// Pearson correlation with population moments. Throws ZeroVariance when either
// grid is constant, DimMismatch on shape mismatch.
double cc(const SaliencyGrid& p, const SaliencyGrid& q);

// Histogram intersection. Throws NotNormalized, DimMismatch.
double sim(const SaliencyGrid& p, const SaliencyGrid& q);

// sum_i q_i log(eps + q_i / (eps + p_i)), p the prediction, q the reference.
// Throws NotNormalized, DimMismatch.
double kld_judd(const SaliencyGrid& p, const SaliencyGrid& q);

// sum_i p_i log(p_i / q_i), natural log, 0 log 0 = 0.
// Throws UndefinedRatio, NotNormalized, DimMismatch.
double kld_plain(const SaliencyGrid& p, const SaliencyGrid& q);

enum class GroundDistance { Euclidean, Manhattan };

const char* to_string(GroundDistance d) noexcept;
// Throws InvalidArgument.
GroundDistance parse_ground_distance(const std::string& name);

struct EmdOptions {
  // Inputs taller or wider than this are resampled (mass-preserving) first.
  std::size_t max_resolution = 32;
  GroundDistance distance = GroundDistance::Euclidean;
};

struct Flow {
  std::size_t from = 0;  // row-major bin of p
  std::size_t to = 0;    // row-major bin of q
  double mass = 0.0;
};

struct FlowPlan {
  std::vector<Flow> flows;
  double total_cost = 0.0;  // sum f_ij d_ij
};

struct EmdResult {
  double value = 0.0;  // transport cost plus the mass-mismatch penalty
  FlowPlan plan;
  std::size_t height = 0;  // resolution the problem was solved at
  std::size_t width = 0;
};

// Ground distance between two cells, in cell units.
double ground_distance(std::size_t from, std::size_t to, std::size_t width, GroundDistance d);

// Linear-variant EMD solved exactly as a transportation problem. Grids need
// not be normalized. Both all-zero gives 0. Throws DimMismatch.
EmdResult emd(const SaliencyGrid& p, const SaliencyGrid& q, const EmdOptions& options = {});

struct PairMetrics {
  std::string id;
  std::optional<double> cc;
  std::optional<double> sim;
  std::optional<double> kld_judd;
  std::optional<double> kld_plain;
  std::optional<double> emd;
  std::vector<std::string> flags;  // e.g. "cc:ZeroVariance"
};

struct MetricMeans {
  double cc = 0.0;
  double sim = 0.0;
  double kld_judd = 0.0;
  double kld_plain = 0.0;
  double emd = 0.0;
};

struct MetricCounts {
  std::size_t images = 0;
  std::size_t cc = 0;
  std::size_t sim = 0;
  std::size_t kld_judd = 0;
  std::size_t kld_plain = 0;
  std::size_t emd = 0;
  std::size_t cc_excluded = 0;
  std::size_t failed = 0;  // images with at least one failed metric
};

struct MetricReport {
  std::vector<PairMetrics> images;
  MetricMeans means;  // over defined values only
  MetricCounts counts;
  EmdOptions emd_options;
};

struct EvalPair {
  std::string id;
  SaliencyGrid prediction;
  SaliencyGrid reference;
};

// Scores every pair; per-pair failures become flags, never exceptions.
// Results are identical for any jobs value.
MetricReport evaluate_batch(std::span<const EvalPair> pairs, const EmdOptions& options = {},
                            std::size_t jobs = 1);

}  // namespace persal
