// Copyright 2026 The qdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "qdist/errors.hpp"

namespace qdist {

/// Undirected graph with a dense symmetric weight matrix; w(i, i) is ignored.
struct WeightedGraph {
  Eigen::MatrixXd weights;

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }
  double weight(std::size_t i, std::size_t j) const {
    return weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

struct CutEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;
};

struct CutResult {
  std::vector<std::size_t> side_a;  // ascending
  std::vector<std::size_t> side_b;  // ascending
  double cut_weight = 0.0;
  std::vector<CutEdge> edges_removed;  // i in side_a, j in side_b, weight > 0
};

/// Builds the cut bookkeeping for a given side_a membership.
inline CutResult make_cut(const WeightedGraph& g, const std::vector<bool>& in_a) {
  CutResult out;
  for (std::size_t v = 0; v < g.size(); ++v) (in_a[v] ? out.side_a : out.side_b).push_back(v);
  for (std::size_t i : out.side_a) {
    for (std::size_t j : out.side_b) {
      const double w = g.weight(i, j);
      if (w > 0.0) {
        out.edges_removed.push_back({i, j, w});
        out.cut_weight += w;
      }
    }
  }
  return out;
}

/// Global minimum cut by Stoer-Wagner (maximum-adjacency phases, O(n^3)).
inline CutResult stoer_wagner_min_cut(const WeightedGraph& g) {
  const std::size_t n = g.size();
  if (g.weights.rows() != g.weights.cols()) throw InputError("stoer_wagner_min_cut: weights not square");
  if (n < 2) throw InputError("stoer_wagner_min_cut: need at least two vertices");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = g.weight(i, j);
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InputError("stoer_wagner_min_cut: weights must be finite and non-negative");
      }
      if (w != g.weight(j, i)) throw InputError("stoer_wagner_min_cut: weights not symmetric");
    }
  }

  Eigen::MatrixXd w = g.weights;
  w.diagonal().setZero();
  // members[v]: original vertices merged into super-vertex v.
  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t v = 0; v < n; ++v) members[v] = {v};
  std::vector<std::size_t> alive(n);
  for (std::size_t v = 0; v < n; ++v) alive[v] = v;

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_side;

  while (alive.size() > 1) {
    const std::size_t m = alive.size();
    std::vector<bool> added(m, false);
    std::vector<double> key(m, 0.0);
    std::size_t prev = 0;
    std::size_t last = 0;
    for (std::size_t step = 0; step < m; ++step) {
      std::size_t sel = m;
      for (std::size_t k = 0; k < m; ++k) {
        if (!added[k] && (sel == m || key[k] > key[sel])) sel = k;
      }
      added[sel] = true;
      prev = last;
      last = sel;
      if (step + 1 == m) break;
      for (std::size_t k = 0; k < m; ++k) {
        if (!added[k]) key[k] += w(static_cast<Eigen::Index>(alive[sel]), static_cast<Eigen::Index>(alive[k]));
      }
    }
    const double cut_of_phase = key[last];
    if (cut_of_phase < best) {
      best = cut_of_phase;
      best_side = members[alive[last]];
    }
    // Merge `last` into `prev`.
    const auto s = static_cast<Eigen::Index>(alive[prev]);
    const auto t = static_cast<Eigen::Index>(alive[last]);
    w.row(s) += w.row(t);
    w.col(s) += w.col(t);
    w(s, s) = 0.0;
    auto& into = members[alive[prev]];
    into.insert(into.end(), members[alive[last]].begin(), members[alive[last]].end());
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(last));
  }

  std::vector<bool> in_a(n, false);
  for (std::size_t v : best_side) in_a[v] = true;
  // Normalize so vertex 0 is on side A.
  if (!in_a[0]) in_a.flip();
  return make_cut(g, in_a);
}

}  // namespace qdist
