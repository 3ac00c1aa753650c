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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "persal/error.hpp"
#include "persal/metrics.hpp"

namespace persal {

const char* to_string(GroundDistance d) noexcept {
  return d == GroundDistance::Manhattan ? "manhattan" : "euclidean";
}

GroundDistance parse_ground_distance(const std::string& name) {
  if (name == "euclidean") return GroundDistance::Euclidean;
  if (name == "manhattan") return GroundDistance::Manhattan;
  throw Error(ErrorCode::InvalidArgument,
              "unknown ground distance '" + name + "' (expected euclidean or manhattan)");
}

double ground_distance(std::size_t from, std::size_t to, std::size_t width, GroundDistance d) {
  const double dr = std::abs(static_cast<double>(from / width) - static_cast<double>(to / width));
  const double dc = std::abs(static_cast<double>(from % width) - static_cast<double>(to % width));
  return d == GroundDistance::Manhattan ? dr + dc : std::sqrt(dr * dr + dc * dc);
}

namespace {

// Transportation problem on a complete bipartite graph, solved with the
// primal network simplex. A zero-cost dummy row or column absorbs the mass
// imbalance, so exactly min(sum supply, sum demand) moves between real bins.
class TransportSimplex {
 public:
  struct Arc {
    std::size_t row = 0;
    std::size_t col = 0;
    double flow = 0.0;
  };

  TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                   std::vector<double> cost)
      : n_src_(supply.size()), n_dst_(demand.size()), cost_(std::move(cost)) {
    double total_supply = 0.0;
    double total_demand = 0.0;
    for (double v : supply) total_supply += v;
    for (double v : demand) total_demand += v;
    if (total_supply > total_demand) demand.push_back(total_supply - total_demand);
    if (total_demand > total_supply) supply.push_back(total_demand - total_supply);
    rows_ = supply.size();
    cols_ = demand.size();
    northwest_corner(std::move(supply), std::move(demand));
  }

  void solve() {
    adjacency_.assign(rows_ + cols_, {});
    for (std::size_t a = 0; a < arcs_.size(); ++a) link(a);
    const std::size_t candidates = rows_ * cols_;
    block_ = std::max<std::size_t>(16, static_cast<std::size_t>(std::sqrt(double(candidates))));
    // Generous bound; degenerate cycling is the only way to reach it.
    const std::size_t max_pivots = 64 * candidates + 1000;
    index_tree();
    for (std::size_t pivot = 0; pivot < max_pivots; ++pivot) {
      const auto entering = price();
      if (!entering) break;
      exchange(entering->first, entering->second);
    }
  }

  // Basic arcs between real bins (dummy row and column excluded).
  std::vector<Arc> flows() const {
    std::vector<Arc> out;
    for (const Arc& a : arcs_) {
      if (a.row < n_src_ && a.col < n_dst_ && a.flow > 0.0) out.push_back(a);
    }
    std::sort(out.begin(), out.end(), [](const Arc& x, const Arc& y) {
      return x.row != y.row ? x.row < y.row : x.col < y.col;
    });
    return out;
  }

  double cost(std::size_t row, std::size_t col) const {
    return row < n_src_ && col < n_dst_ ? cost_[row * n_dst_ + col] : 0.0;
  }

 private:
  static constexpr double kPriceTolerance = 1e-10;
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t col_node(std::size_t col) const { return rows_ + col; }

  // Initial basis: rows_ + cols_ - 1 arcs forming a spanning tree.
  void northwest_corner(std::vector<double> supply, std::vector<double> demand) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (true) {
      const double x = std::min(supply[i], demand[j]);
      arcs_.push_back({i, j, x});
      supply[i] -= x;
      demand[j] -= x;
      if (i + 1 == rows_ && j + 1 == cols_) break;
      if (i + 1 == rows_) {
        ++j;
      } else if (j + 1 == cols_ || supply[i] <= demand[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void link(std::size_t a) {
    adjacency_[arcs_[a].row].push_back(a);
    adjacency_[col_node(arcs_[a].col)].push_back(a);
  }

  void unlink(std::size_t a) {
    for (std::size_t node : {arcs_[a].row, col_node(arcs_[a].col)}) {
      auto& list = adjacency_[node];
      list.erase(std::find(list.begin(), list.end(), a));
    }
  }

  // Potentials (u_i + v_j = c_ij on basic arcs), parents and depths.
  void index_tree() {
    const std::size_t n = rows_ + cols_;
    potential_.assign(n, 0.0);
    parent_arc_.assign(n, kNone);
    depth_.assign(n, 0);
    order_.clear();
    order_.push_back(0);
    std::vector<bool> seen(n, false);
    seen[0] = true;
    for (std::size_t k = 0; k < order_.size(); ++k) {
      const std::size_t u = order_[k];
      for (std::size_t a : adjacency_[u]) {
        const Arc& arc = arcs_[a];
        const std::size_t v = u < rows_ ? col_node(arc.col) : arc.row;
        if (seen[v]) continue;
        seen[v] = true;
        potential_[v] = cost(arc.row, arc.col) - potential_[u];
        parent_arc_[v] = a;
        depth_[v] = depth_[u] + 1;
        order_.push_back(v);
      }
    }
  }

  std::size_t parent_node(std::size_t v) const {
    const Arc& arc = arcs_[parent_arc_[v]];
    return v < rows_ ? col_node(arc.col) : arc.row;
  }

  // Block search for the most negative reduced cost.
  std::optional<std::pair<std::size_t, std::size_t>> price() {
    const std::size_t total = rows_ * cols_;
    double best = -kPriceTolerance;
    std::size_t best_k = kNone;
    for (std::size_t scanned = 0; scanned < total; ++scanned) {
      const std::size_t k = next_;
      next_ = next_ + 1 == total ? 0 : next_ + 1;
      const std::size_t i = k / cols_;
      const std::size_t j = k % cols_;
      const double rc = cost(i, j) - potential_[i] - potential_[col_node(j)];
      if (rc < best) {
        best = rc;
        best_k = k;
      }
      if ((scanned + 1) % block_ == 0 && best_k != kNone) break;
    }
    if (best_k == kNone) return std::nullopt;
    return std::pair{best_k / cols_, best_k % cols_};
  }

  // Brings arc (i, j) into the basis and drops the blocking arc of its cycle.
  void exchange(std::size_t i, std::size_t j) {
    // Tree path from column j back to row i; its arcs alternate -, +, -, ...
    std::vector<std::size_t> from_col;
    std::vector<std::size_t> from_row;
    std::size_t a = col_node(j);
    std::size_t b = i;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        from_col.push_back(parent_arc_[a]);
        a = parent_node(a);
      } else {
        from_row.push_back(parent_arc_[b]);
        b = parent_node(b);
      }
    }
    const std::size_t col_side = from_col.size();
    std::vector<std::size_t> cycle = std::move(from_col);
    cycle.insert(cycle.end(), from_row.rbegin(), from_row.rend());

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    bool leaving_on_col_side = false;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      if (arcs_[cycle[k]].flow < theta) {
        theta = arcs_[cycle[k]].flow;
        leaving = cycle[k];
        leaving_on_col_side = k < col_side;
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      double& f = arcs_[cycle[k]].flow;
      f = k % 2 == 0 ? std::max(f - theta, 0.0) : f + theta;
    }
    unlink(leaving);
    arcs_[leaving] = {i, j, theta};
    link(leaving);

    // Only the subtree cut off by the leaving arc moves; it now hangs from
    // the entering arc.
    const std::size_t inner = leaving_on_col_side ? col_node(j) : i;
    const std::size_t outer = leaving_on_col_side ? i : col_node(j);
    potential_[inner] = cost(i, j) - potential_[outer];
    parent_arc_[inner] = leaving;
    depth_[inner] = depth_[outer] + 1;
    order_.assign(1, inner);
    for (std::size_t k = 0; k < order_.size(); ++k) {
      const std::size_t u = order_[k];
      for (std::size_t a : adjacency_[u]) {
        if (a == parent_arc_[u]) continue;
        const Arc& arc = arcs_[a];
        const std::size_t v = u < rows_ ? col_node(arc.col) : arc.row;
        potential_[v] = cost(arc.row, arc.col) - potential_[u];
        parent_arc_[v] = a;
        depth_[v] = depth_[u] + 1;
        order_.push_back(v);
      }
    }
  }

  std::size_t n_src_;
  std::size_t n_dst_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cost_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<double> potential_;
  std::vector<std::size_t> parent_arc_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> order_;
  std::size_t block_ = 16;
  std::size_t next_ = 0;
};

// Rescales to the EMD working resolution, preserving total mass.
SaliencyGrid to_working_resolution(const SaliencyGrid& g, const EmdOptions& options) {
  const std::size_t h = std::min(g.height(), options.max_resolution);
  const std::size_t w = std::min(g.width(), options.max_resolution);
  if (h == g.height() && w == g.width()) return g;
  const double mass = g.sum();
  SaliencyGrid out = resample(g, h, w);
  const double got = out.sum();
  if (got > 0.0) {
    auto values = out.mutable_values();
    for (double& v : values) v *= mass / got;
  }
  return out;
}

}  // namespace

EmdResult emd(const SaliencyGrid& p_in, const SaliencyGrid& q_in, const EmdOptions& options) {
  if (!p_in.same_shape(q_in)) throw Error(ErrorCode::DimMismatch, "EMD operands differ in shape");
  if (options.max_resolution == 0) {
    throw Error(ErrorCode::InvalidArgument, "EMD resolution must be positive");
  }
  const SaliencyGrid p = to_working_resolution(p_in, options);
  const SaliencyGrid q = to_working_resolution(q_in, options);
  const std::size_t n = p.size();
  const std::size_t width = p.width();

  EmdResult result;
  result.height = p.height();
  result.width = width;

  const double mass_p = p.sum();
  const double mass_q = q.sum();
  if (mass_p == 0.0 && mass_q == 0.0) return result;

  // With a metric ground distance, mass shared by p and q at the same bin
  // stays in place in some optimal plan, so only the differences move.
  std::vector<std::size_t> src_bins;
  std::vector<std::size_t> dst_bins;
  std::vector<double> supply;
  std::vector<double> demand;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = p.values()[i];
    const double b = q.values()[i];
    const double kept = std::min(a, b);
    if (kept > 0.0) result.plan.flows.push_back({i, i, kept});
    if (a > b) {
      src_bins.push_back(i);
      supply.push_back(a - b);
    } else if (b > a) {
      dst_bins.push_back(i);
      demand.push_back(b - a);
    }
  }

  if (!src_bins.empty() && !dst_bins.empty()) {
    std::vector<double> cost(src_bins.size() * dst_bins.size());
    for (std::size_t s = 0; s < src_bins.size(); ++s) {
      for (std::size_t t = 0; t < dst_bins.size(); ++t) {
        cost[s * dst_bins.size() + t] =
            ground_distance(src_bins[s], dst_bins[t], width, options.distance);
      }
    }
    TransportSimplex solver(std::move(supply), std::move(demand), std::move(cost));
    solver.solve();
    for (const auto& arc : solver.flows()) {
      result.plan.flows.push_back({src_bins[arc.row], dst_bins[arc.col], arc.flow});
      result.plan.total_cost += arc.flow * solver.cost(arc.row, arc.col);
    }
  }

  const double max_distance = ground_distance(0, n - 1, width, options.distance);
  result.value = result.plan.total_cost + std::abs(mass_p - mass_q) * max_distance;
  return result;
}

}  // namespace persal
