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

#include "persal/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>

#include "persal/error.hpp"
#include "persal/metrics.hpp"
#include "persal/random.hpp"

namespace persal {

namespace {

double snap(double v) { return std::round(v * 1e12) / 1e12; }

void check_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, std::string(name) + " is empty");
  for (double v : grid) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " values must lie in [0,1]");
    }
  }
}

struct ImageScore {
  std::optional<double> cc;
  double sim = 0.0;
};

ImageScore score_image(const SweepInputs& in, const GtWeights& w, std::size_t i) {
  const SaliencyGrid psal = generate_psal(in.dataset[i], in.mapping, in.pvec, w, in.generation);
  ImageScore s;
  s.sim = sim(psal, in.labels[i]);
  try {
    s.cc = cc(psal, in.labels[i]);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVariance) throw;
  }
  return s;
}

// Prefers `a` over `b` on exact objective ties when `a` has the smaller alpha,
// then the larger beta.
bool preferred_on_tie(const GtWeights& a, const GtWeights& b) {
  if (a.alpha != b.alpha) return a.alpha < b.alpha;
  return a.beta > b.beta;
}

SweepResult run_sweep(const SweepInputs& in, const std::vector<GtWeights>& weights,
                      const std::vector<double>& swept) {
  SweepResult result;
  bool have_best = false;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    SweepCandidate c = score_weights(in, weights[k]);
    c.swept = swept[k];
    if (!c.failed) {
      const SweepCandidate* best = have_best ? &result.candidates[result.best_index] : nullptr;
      if (!best || c.objective > best->objective ||
          (c.objective == best->objective && preferred_on_tie(c.weights, best->weights))) {
        result.best_index = k;
        have_best = true;
      }
    }
    result.candidates.push_back(std::move(c));
  }
  if (!have_best) throw Error(ErrorCode::InvalidArgument, "no sweep candidate could be scored");
  result.best = result.candidates[result.best_index].weights;
  return result;
}

}  // namespace

GtWeights final_weights(double alpha, double beta_fraction) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta_fraction >= 0.0 && beta_fraction <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "alpha and beta fraction must lie in [0,1]");
  }
  const double rest = 1.0 - alpha;
  return {alpha, snap(rest * beta_fraction), snap(rest * (1.0 - beta_fraction))};
}

void SweepSpec::validate() const {
  check_grid(alpha_grid, "alpha grid");
  check_grid(ratio_grid, "ratio grid");
  check_grid({fixed_alpha}, "fixed alpha");
  check_grid({fixed_beta_fraction}, "fixed ratio");
}

SweepCandidate score_weights(const SweepInputs& in, const GtWeights& w) {
  SweepCandidate c;
  c.weights = w;
  if (in.dataset.size() != in.labels.size()) {
    throw Error(ErrorCode::InvalidArgument, "dataset and label counts differ");
  }
  std::vector<ImageScore> scores(in.dataset.size());
  std::vector<std::string> errors(in.dataset.size());
  auto work = [&](std::size_t i) {
    try {
      scores[i] = score_image(in, w, i);
    } catch (const Error& e) {
      errors[i] = "image " + std::to_string(i) + ": " + to_string(e.code()) + ": " + e.what();
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(in.jobs, 1, std::max<std::size_t>(in.dataset.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < scores.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < scores.size(); i += workers) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  double cc_sum = 0.0;
  double sim_sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!errors[i].empty()) {
      c.failed = true;
      c.error = errors[i];
      return c;
    }
    if (!scores[i].cc) {
      ++c.cc_excluded;
      continue;
    }
    cc_sum += *scores[i].cc;
    sim_sum += scores[i].sim;
    ++c.scored;
  }
  if (c.scored == 0) {
    c.failed = true;
    c.error = "no image has a defined correlation";
    return c;
  }
  c.mean_cc = cc_sum / static_cast<double>(c.scored);
  c.mean_sim = sim_sum / static_cast<double>(c.scored);
  c.objective = c.mean_cc + c.mean_sim;
  return c;
}

SweepResult sweep_alpha(const SweepInputs& in, const SweepSpec& spec) {
  spec.validate();
  std::vector<GtWeights> weights;
  for (double a : spec.alpha_grid) weights.push_back(final_weights(a, spec.fixed_beta_fraction));
  return run_sweep(in, weights, spec.alpha_grid);
}

SweepResult sweep_ratio(const SweepInputs& in, const SweepSpec& spec) {
  spec.validate();
  std::vector<GtWeights> weights;
  for (double f : spec.ratio_grid) weights.push_back(final_weights(spec.fixed_alpha, f));
  return run_sweep(in, weights, spec.ratio_grid);
}

namespace {

// Separable Gaussian blur with edge-renormalized kernel.
std::vector<double> blur(const std::vector<double>& in, std::size_t h, std::size_t w,
                         double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
  }
  auto pass = [&](const std::vector<double>& src, bool horizontal) {
    std::vector<double> dst(src.size(), 0.0);
    for (std::size_t r = 0; r < h; ++r) {
      for (std::size_t c = 0; c < w; ++c) {
        double acc = 0.0;
        double norm = 0.0;
        for (int k = -radius; k <= radius; ++k) {
          const long rr = static_cast<long>(r) + (horizontal ? 0 : k);
          const long cc = static_cast<long>(c) + (horizontal ? k : 0);
          if (rr < 0 || cc < 0 || rr >= static_cast<long>(h) || cc >= static_cast<long>(w)) continue;
          acc += kernel[k + radius] * src[rr * w + cc];
          norm += kernel[k + radius];
        }
        dst[r * w + c] = acc / norm;
      }
    }
    return dst;
  };
  return pass(pass(in, true), false);
}

Box random_box(Rng& rng, const SyntheticOptions& o, bool off_center) {
  const auto iw = static_cast<double>(o.image_width);
  const auto ih = static_cast<double>(o.image_height);
  Box b;
  for (int attempt = 0; attempt < 200; ++attempt) {
    b.w = rng.uniform(0.15, 0.4) * iw;
    b.h = rng.uniform(0.15, 0.4) * ih;
    b.x = rng.uniform(0.0, iw - b.w);
    b.y = rng.uniform(0.0, ih - b.h);
    if (!off_center) break;
    const double dx = (b.x + b.w / 2 - iw / 2) / iw;
    const double dy = (b.y + b.h / 2 - ih / 2) / ih;
    if (std::sqrt(dx * dx + dy * dy) >= 0.25) break;
  }
  return b;
}

}  // namespace

std::vector<AnnotatedImage> make_synthetic_dataset(const SyntheticOptions& o) {
  if (o.image_width == 0 || o.image_height == 0 || o.grid_height == 0 || o.grid_width == 0) {
    throw Error(ErrorCode::ZeroDim, "synthetic dataset dimensions must be positive");
  }
  if (o.categories.empty() || o.min_objects > o.max_objects) {
    throw Error(ErrorCode::InvalidArgument, "synthetic object settings are inconsistent");
  }
  Rng rng(o.seed);
  const std::size_t gh = o.grid_height;
  const std::size_t gw = o.grid_width;
  std::vector<AnnotatedImage> out;
  out.reserve(o.n_images);
  for (std::size_t n = 0; n < o.n_images; ++n) {
    DetectionSet boxes;
    boxes.image_id = "syn" + std::to_string(n);
    boxes.image_width = o.image_width;
    boxes.image_height = o.image_height;
    const std::size_t count = o.min_objects + rng.below(o.max_objects - o.min_objects + 1);
    for (std::size_t k = 0; k < count; ++k) {
      int cat = o.categories[rng.below(o.categories.size())];
      if (k == 0 && o.required_category >= 0) cat = o.required_category;
      boxes.detections.push_back({cat, 1.0, random_box(rng, o, cat == o.off_center_category)});
    }
    boxes.validate();

    // Half the fixations follow a centre bias, the rest land on objects.
    std::vector<double> hits(gh * gw, 0.0);
    const int n_fix = 24;
    for (int f = 0; f < n_fix; ++f) {
      double r = 0.0;
      double c = 0.0;
      if (rng.uniform() < 0.5 || boxes.detections.empty()) {
        // Sum of uniforms approximates a centred bell without std distributions.
        const double u = (rng.uniform() + rng.uniform() + rng.uniform()) / 3.0;
        const double v = (rng.uniform() + rng.uniform() + rng.uniform()) / 3.0;
        r = u * static_cast<double>(gh);
        c = v * static_cast<double>(gw);
      } else {
        const Box& b = boxes.detections[rng.below(boxes.detections.size())].box;
        r = (b.y + rng.uniform() * b.h) * static_cast<double>(gh) / static_cast<double>(o.image_height);
        c = (b.x + rng.uniform() * b.w) * static_cast<double>(gw) / static_cast<double>(o.image_width);
      }
      const auto ri = std::min(static_cast<std::size_t>(r), gh - 1);
      const auto ci = std::min(static_cast<std::size_t>(c), gw - 1);
      hits[ri * gw + ci] += 1.0;
    }
    const double sigma = 0.06 * static_cast<double>(std::max(gh, gw));
    SaliencyGrid sal(gh, gw, blur(hits, gh, gw, sigma));
    out.push_back({normalize_sum(sal), std::move(boxes)});
  }
  return out;
}

}  // namespace persal
