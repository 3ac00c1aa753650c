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

#include "persal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "persal/error.hpp"

namespace persal {

namespace {

void require_same_shape(const SaliencyGrid& p, const SaliencyGrid& q) {
  if (p.empty() || q.empty()) throw Error(ErrorCode::ZeroDim, "metric operand is empty");
  if (!p.same_shape(q)) {
    throw Error(ErrorCode::DimMismatch,
                std::to_string(p.height()) + "x" + std::to_string(p.width()) + " vs " +
                    std::to_string(q.height()) + "x" + std::to_string(q.width()));
  }
}

void require_distribution(const SaliencyGrid& g, const char* which) {
  const double s = g.sum();
  if (std::abs(s - 1.0) > kMetricSumTolerance) {
    throw Error(ErrorCode::NotNormalized,
                std::string(which) + " pixel-sum is " + std::to_string(s) + ", expected 1");
  }
}

bool is_constant(const SaliencyGrid& g) {
  const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
  return *lo == *hi;
}

}  // namespace

double cc(const SaliencyGrid& p, const SaliencyGrid& q) {
  require_same_shape(p, q);
  if (is_constant(p) || is_constant(q)) {
    throw Error(ErrorCode::ZeroVariance, "correlation is undefined for a constant grid");
  }
  const auto n = static_cast<double>(p.size());
  const double mean_p = p.sum() / n;
  const double mean_q = q.sum() / n;
  double cov = 0.0;
  double var_p = 0.0;
  double var_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double dp = p.values()[i] - mean_p;
    const double dq = q.values()[i] - mean_q;
    cov += dp * dq;
    var_p += dp * dp;
    var_q += dq * dq;
  }
  return std::clamp(cov / std::sqrt(var_p * var_q), -1.0, 1.0);
}

double sim(const SaliencyGrid& p, const SaliencyGrid& q) {
  require_same_shape(p, q);
  require_distribution(p, "prediction");
  require_distribution(q, "reference");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::min(p.values()[i], q.values()[i]);
  return total;
}

double kld_judd(const SaliencyGrid& p, const SaliencyGrid& q) {
  require_same_shape(p, q);
  require_distribution(p, "prediction");
  require_distribution(q, "reference");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double qi = q.values()[i];
    total += qi * std::log(kJuddEpsilon + qi / (kJuddEpsilon + p.values()[i]));
  }
  return total;
}

double kld_plain(const SaliencyGrid& p, const SaliencyGrid& q) {
  require_same_shape(p, q);
  require_distribution(p, "prediction");
  require_distribution(q, "reference");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p.values()[i];
    const double qi = q.values()[i];
    if (pi == 0.0) continue;
    if (qi == 0.0) {
      throw Error(ErrorCode::UndefinedRatio,
                  "reference is zero where prediction has mass (bin " + std::to_string(i) + ")");
    }
    total += pi * std::log(pi / qi);
  }
  return total;
}

namespace {

template <typename F>
std::optional<double> guarded(F&& metric, const char* name, std::vector<std::string>& flags) {
  try {
    return metric();
  } catch (const Error& e) {
    flags.push_back(std::string(name) + ":" + to_string(e.code()));
    return std::nullopt;
  }
}

PairMetrics score_pair(const EvalPair& pair, const EmdOptions& options) {
  PairMetrics m;
  m.id = pair.id;
  const SaliencyGrid& p = pair.prediction;
  const SaliencyGrid& q = pair.reference;
  m.cc = guarded([&] { return cc(p, q); }, "cc", m.flags);
  m.sim = guarded([&] { return sim(p, q); }, "sim", m.flags);
  m.kld_judd = guarded([&] { return kld_judd(p, q); }, "kld_judd", m.flags);
  m.kld_plain = guarded([&] { return kld_plain(p, q); }, "kld_plain", m.flags);
  m.emd = guarded([&] { return emd(p, q, options).value; }, "emd", m.flags);
  return m;
}

void accumulate(const std::optional<double>& v, double& sum, std::size_t& count) {
  if (v) {
    sum += *v;
    ++count;
  }
}

}  // namespace

MetricReport evaluate_batch(std::span<const EvalPair> pairs, const EmdOptions& options,
                            std::size_t jobs) {
  MetricReport report;
  report.emd_options = options;
  report.images.resize(pairs.size());

  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(pairs.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < pairs.size(); ++i) report.images[i] = score_pair(pairs[i], options);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < pairs.size(); i += workers) {
          report.images[i] = score_pair(pairs[i], options);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  MetricMeans sums;
  MetricCounts& counts = report.counts;
  counts.images = pairs.size();
  for (const PairMetrics& m : report.images) {
    accumulate(m.cc, sums.cc, counts.cc);
    accumulate(m.sim, sums.sim, counts.sim);
    accumulate(m.kld_judd, sums.kld_judd, counts.kld_judd);
    accumulate(m.kld_plain, sums.kld_plain, counts.kld_plain);
    accumulate(m.emd, sums.emd, counts.emd);
    if (!m.cc) ++counts.cc_excluded;
    if (!m.flags.empty()) ++counts.failed;
  }
  auto mean = [](double s, std::size_t n) { return n ? s / static_cast<double>(n) : 0.0; };
  report.means = {mean(sums.cc, counts.cc), mean(sums.sim, counts.sim),
                  mean(sums.kld_judd, counts.kld_judd), mean(sums.kld_plain, counts.kld_plain),
                  mean(sums.emd, counts.emd)};
  return report;
}

}  // namespace persal
