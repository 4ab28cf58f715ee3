// Copyright 2026 The credscore Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Second-order gradient boosting of regression trees on the logistic loss.
//
// Each round fits one tree to the per-row gradient g = p - y and hessian
// h = p (1 - p) of the current margins. Trees are grown level by level with
// exact greedy split search over presorted columns:
//
//   gain = 1/2 [ G_L^2 / (H_L + lambda) + G_R^2 / (H_R + lambda) - G^2 / (H + lambda) ]
//
// Candidate thresholds are midpoints between consecutive distinct values; rows
// with x < threshold go left. NaN marks a missing value and follows the node's
// default direction, chosen as whichever side gives the larger gain (left on
// ties). Equal gains resolve to the lower column, then the lower threshold.
// Leaves output -G / (H + lambda) scaled by the learning rate.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "credscore/common.hpp"
#include "credscore/logreg.hpp"
#include "credscore/matrix.hpp"

namespace credscore {

struct GbdtConfig {
  int rounds = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  int min_leaf = 20;
  double lambda = 1.0;

  bool operator==(const GbdtConfig&) const = default;
};

struct TreeNode {
  int column = -1;  // -1 for leaves
  double threshold = 0.0;
  bool default_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, already scaled by the learning rate

  bool is_leaf() const noexcept { return column < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
      const TreeNode& n = nodes[i];
      const double v = x[n.column];
      const bool go_left = std::isnan(v) ? n.default_left : v < n.threshold;
      i = go_left ? n.left : n.right;
    }
    return nodes[i].value;
  }

  int depth() const { return depth_from(0); }
  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
  }

  bool operator==(const RegressionTree&) const = default;

 private:
  int depth_from(int i) const {
    if (nodes[i].is_leaf()) return 0;
    return 1 + std::max(depth_from(nodes[i].left), depth_from(nodes[i].right));
  }
};

struct GbdtModel {
  GbdtConfig config;
  std::size_t columns = 0;
  double base_score = 0.0;  // log-odds of the training prior
  std::vector<RegressionTree> trees;

  bool operator==(const GbdtModel&) const = default;
};

inline double gbdt_margin(const GbdtModel& m, std::span<const double> x) {
  double z = m.base_score;
  for (const auto& t : m.trees) z += t.predict(x);
  return z;
}

inline double predict_gbdt(const GbdtModel& m, std::span<const double> x) {
  if (x.size() != m.columns)
    throw std::invalid_argument("predict_gbdt: expected " + std::to_string(m.columns) + " columns, got " +
                                std::to_string(x.size()));
  return sigmoid(gbdt_margin(m, x));
}

inline std::vector<double> predict_gbdt(const GbdtModel& m, const Matrix& X) {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict_gbdt(m, X.row(r));
  return out;
}

inline double mean_log_loss(std::span<const double> margins, std::span<const int> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) s += softplus(margins[i]) - y[i] * margins[i];
  return s / static_cast<double>(margins.size());
}

namespace detail {

inline constexpr double kMinSplitGain = 1e-10;

// Renumbers nodes in preorder (node, left subtree, right subtree), the layout
// used by the text serialization.
inline RegressionTree to_preorder(const RegressionTree& tree) {
  RegressionTree out;
  out.nodes.reserve(tree.nodes.size());
  auto visit = [&](auto&& self, int id) -> int {
    const int at = static_cast<int>(out.nodes.size());
    out.nodes.push_back(tree.nodes[id]);
    if (!tree.nodes[id].is_leaf()) {
      const int l = self(self, tree.nodes[id].left);
      const int r = self(self, tree.nodes[id].right);
      out.nodes[at].left = l;
      out.nodes[at].right = r;
    }
    return at;
  };
  if (!tree.nodes.empty()) visit(visit, 0);
  return out;
}

struct GradStats {
  double g = 0.0;
  double h = 0.0;
  int n = 0;

  void add(double gi, double hi) {
    g += gi;
    h += hi;
    ++n;
  }
  GradStats operator-(const GradStats& o) const { return {g - o.g, h - o.h, n - o.n}; }
  GradStats operator+(const GradStats& o) const { return {g + o.g, h + o.h, n + o.n}; }
};

struct SplitChoice {
  double gain = kMinSplitGain;
  int column = -1;
  double threshold = 0.0;
  bool default_left = true;
};

// Non-missing rows of one column, ascending by value (ties by row index).
struct SortedColumn {
  std::vector<std::pair<double, int>> entries;
  std::vector<int> missing;
};

class TreeGrower {
 public:
  TreeGrower(const Matrix& X, const std::vector<SortedColumn>& sorted, const GbdtConfig& config)
      : X_(X), sorted_(sorted), config_(config) {}

  // Grows one tree and writes each row's leaf output into `leaf_out`.
  RegressionTree grow(const std::vector<double>& g, const std::vector<double>& h, std::vector<double>& leaf_out) {
    const std::size_t n = X_.rows();
    RegressionTree tree;
    tree.nodes.emplace_back();
    node_of_.assign(n, 0);
    std::vector<GradStats> stats(1);
    for (std::size_t r = 0; r < n; ++r) stats[0].add(g[r], h[r]);

    std::vector<int> frontier{0};
    for (int depth = 0; depth < config_.max_depth && !frontier.empty(); ++depth) {
      const auto splits = find_splits(frontier, stats, g, h);

      std::vector<int> next;
      for (std::size_t k = 0; k < frontier.size(); ++k) {
        if (splits[k].column < 0) continue;
        const int id = frontier[k];
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& node = tree.nodes[id];
        node.column = splits[k].column;
        node.threshold = splits[k].threshold;
        node.default_left = splits[k].default_left;
        node.left = left;
        node.right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }
      if (next.empty()) break;

      stats.resize(tree.nodes.size());
      for (int id : next) stats[id] = {};
      for (std::size_t r = 0; r < n; ++r) {
        const TreeNode& node = tree.nodes[node_of_[r]];
        if (node.is_leaf()) continue;
        const double v = X_(r, node.column);
        const bool go_left = std::isnan(v) ? node.default_left : v < node.threshold;
        node_of_[r] = go_left ? node.left : node.right;
        stats[node_of_[r]].add(g[r], h[r]);
      }
      frontier = std::move(next);
    }

    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      TreeNode& node = tree.nodes[id];
      if (node.is_leaf()) node.value = -stats[id].g / (stats[id].h + config_.lambda) * config_.learning_rate;
    }
    leaf_out.resize(n);
    for (std::size_t r = 0; r < n; ++r) leaf_out[r] = tree.nodes[node_of_[r]].value;
    return to_preorder(tree);
  }

 private:
  double score(const GradStats& s) const { return s.g * s.g / (s.h + config_.lambda); }

  std::vector<SplitChoice> find_splits(const std::vector<int>& frontier, const std::vector<GradStats>& stats,
                                       const std::vector<double>& g, const std::vector<double>& h) {
    const std::size_t k = frontier.size();
    std::vector<SplitChoice> best(k);
    slot_of_.assign(stats.size(), -1);
    for (std::size_t s = 0; s < k; ++s) slot_of_[frontier[s]] = static_cast<int>(s);

    std::vector<GradStats> missing(k);
    std::vector<GradStats> left(k);
    std::vector<double> last(k);
    const int min_leaf = config_.min_leaf;

    for (std::size_t c = 0; c < sorted_.size(); ++c) {
      std::fill(missing.begin(), missing.end(), GradStats{});
      std::fill(left.begin(), left.end(), GradStats{});
      for (int r : sorted_[c].missing) {
        const int s = slot_of_[node_of_[r]];
        if (s >= 0) missing[s].add(g[r], h[r]);
      }

      auto consider = [&](int s, double threshold) {
        const GradStats& total = stats[frontier[s]];
        const double parent = score(total);
        // Missing rows to the left, then to the right.
        for (bool miss_left : {true, false}) {
          const GradStats l = miss_left ? left[s] + missing[s] : left[s];
          const GradStats r = total - l;
          if (l.n < min_leaf || r.n < min_leaf) continue;
          const double gain = 0.5 * (score(l) + score(r) - parent);
          if (gain > best[s].gain) best[s] = {gain, static_cast<int>(c), threshold, miss_left};
        }
      };

      for (const auto& [v, r] : sorted_[c].entries) {
        const int s = slot_of_[node_of_[r]];
        if (s < 0) continue;
        if (left[s].n > 0 && v > last[s]) {
          double mid = last[s] + (v - last[s]) * 0.5;
          if (!(mid > last[s])) mid = v;
          consider(s, mid);
        }
        left[s].add(g[r], h[r]);
        last[s] = v;
      }
    }
    return best;
  }

  const Matrix& X_;
  const std::vector<SortedColumn>& sorted_;
  const GbdtConfig& config_;
  std::vector<int> node_of_;
  std::vector<int> slot_of_;
};

}  // namespace detail

// `loss_trace`, when given, receives the mean training log loss before the first
// round and after every round.
inline GbdtModel train_gbdt(const Matrix& X, std::span<const int> y, const GbdtConfig& config = {},
                            std::vector<double>* loss_trace = nullptr) {
  const std::size_t n = X.rows();
  if (n != y.size()) throw std::invalid_argument("train_gbdt: row count does not match label count");
  if (config.rounds < 0 || config.max_depth < 0 || config.min_leaf < 1 || !(config.learning_rate > 0.0) ||
      config.lambda < 0.0)
    throw std::invalid_argument("train_gbdt: bad config");
  if (n < 2 * static_cast<std::size_t>(config.min_leaf))
    throw std::invalid_argument("train_gbdt: need at least 2 * min_leaf rows");
  check_binary_labels(y);

  std::vector<detail::SortedColumn> sorted(X.cols());
  for (std::size_t c = 0; c < X.cols(); ++c) {
    auto& col = sorted[c];
    col.entries.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double v = X(r, c);
      if (std::isnan(v)) {
        col.missing.push_back(static_cast<int>(r));
      } else {
        col.entries.emplace_back(v, static_cast<int>(r));
      }
    }
    std::sort(col.entries.begin(), col.entries.end());
  }

  GbdtModel model;
  model.config = config;
  model.columns = X.cols();
  const double positives = static_cast<double>(std::accumulate(y.begin(), y.end(), 0));
  const double prior = positives / static_cast<double>(n);
  model.base_score = std::log(prior / (1.0 - prior));

  std::vector<double> margin(n, model.base_score);
  std::vector<double> g(n), h(n), leaf_out;
  if (loss_trace) loss_trace->assign(1, mean_log_loss(margin, y));

  detail::TreeGrower grower(X, sorted, model.config);
  model.trees.reserve(config.rounds);
  for (int round = 0; round < config.rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) {
      const double p = sigmoid(margin[r]);
      g[r] = p - y[r];
      h[r] = p * (1.0 - p);
    }
    model.trees.push_back(grower.grow(g, h, leaf_out));
    for (std::size_t r = 0; r < n; ++r) margin[r] += leaf_out[r];
    if (loss_trace) loss_trace->push_back(mean_log_loss(margin, y));
  }
  return model;
}

}  // namespace credscore
