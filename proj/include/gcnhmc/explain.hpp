// Copyright 2026 The gcnhmc Authors.
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

// Path-dependent TreeSHAP for multi-output forests, mean |SHAP| feature
// importance and cumulative-cutoff feature selection.

#ifndef GCNHMC_EXPLAIN_HPP
#define GCNHMC_EXPLAIN_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/learn.hpp"

namespace gcnhmc {

/// Shapley values per (instance, feature, label) plus the per-label
/// expected output. base + sum over features == prediction.
class AttributionMatrix {
 public:
  AttributionMatrix() = default;
  AttributionMatrix(std::size_t instances, std::size_t features, std::size_t labels)
      : instances_(instances), features_(features), labels_(labels),
        values_(instances * features * labels, 0.0), base_(labels, 0.0) {}

  std::size_t instances() const { return instances_; }
  std::size_t features() const { return features_; }
  std::size_t labels() const { return labels_; }

  double& operator()(std::size_t i, std::size_t f, std::size_t l) {
    return values_[(i * features_ + f) * labels_ + l];
  }
  double operator()(std::size_t i, std::size_t f, std::size_t l) const {
    return values_[(i * features_ + f) * labels_ + l];
  }
  std::vector<double>& base_values() { return base_; }
  const std::vector<double>& base_values() const { return base_; }

 private:
  std::size_t instances_ = 0, features_ = 0, labels_ = 0;
  std::vector<double> values_;
  std::vector<double> base_;
};

namespace detail {

struct PathElement {
  int feature;
  double zero_fraction;
  double one_fraction;
  double weight;
};

inline void extend_path(PathElement* path, int depth, double zero_fraction, double one_fraction,
                        int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].weight += one_fraction * path[i].weight * (i + 1) / static_cast<double>(depth + 1);
    path[i].weight = zero_fraction * path[i].weight * (depth - i) / static_cast<double>(depth + 1);
  }
}

inline void unwind_path(PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].weight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0) {
      const double tmp = path[i].weight;
      path[i].weight = next * (depth + 1) / static_cast<double>((i + 1) * one);
      next = tmp - path[i].weight * zero * (depth - i) / static_cast<double>(depth + 1);
    } else {
      path[i].weight = path[i].weight * (depth + 1) / static_cast<double>(zero * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

/// Total weight of the path after unwinding `index`, without modifying it.
inline double unwound_path_sum(const PathElement* path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].weight;
  double total = 0;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0) {
      const double tmp = next * (depth + 1) / static_cast<double>((i + 1) * one);
      total += tmp;
      next = path[i].weight - tmp * zero * ((depth - i) / static_cast<double>(depth + 1));
    } else if (zero != 0) {
      total += (path[i].weight / zero) / ((depth - i) / static_cast<double>(depth + 1));
    }
  }
  return total;
}

class TreeShapWalker {
 public:
  TreeShapWalker(const DecisionTree& tree, int max_depth)
      : tree_(tree), arena_(static_cast<std::size_t>((max_depth + 2) * (max_depth + 3) / 2)) {}

  /// Adds this tree's attributions for `x` into phi (features x labels,
  /// row-major by feature).
  void explain(const std::vector<double>& x, std::vector<double>& phi) {
    x_ = &x;
    phi_ = &phi;
    recurse(0, arena_.data(), 0, 1.0, 1.0, -1);
  }

 private:
  void recurse(std::size_t node, PathElement* parent_path, int depth, double zero_fraction,
               double one_fraction, int feature) {
    PathElement* path = parent_path + depth;
    if (depth > 0) std::copy(parent_path, parent_path + depth, path);
    extend_path(path, depth, zero_fraction, one_fraction, feature);
    const auto& n = tree_.nodes[node];
    const auto labels = static_cast<std::size_t>(tree_.n_labels);

    if (n.is_leaf()) {
      const auto value = tree_.value(node);
      for (int i = 1; i <= depth; ++i) {
        const double w = unwound_path_sum(path, depth, i);
        const auto& el = path[i];
        const double scale = w * (el.one_fraction - el.zero_fraction);
        double* out = phi_->data() + static_cast<std::size_t>(el.feature) * labels;
        for (std::size_t l = 0; l < labels; ++l) out[l] += scale * value[l];
      }
      return;
    }

    const bool go_left = (*x_)[static_cast<std::size_t>(n.feature)] <= n.threshold;
    const auto hot = static_cast<std::size_t>(go_left ? n.left : n.right);
    const auto cold = static_cast<std::size_t>(go_left ? n.right : n.left);
    const double hot_fraction = tree_.nodes[hot].cover / n.cover;
    const double cold_fraction = tree_.nodes[cold].cover / n.cover;
    double incoming_zero = 1.0, incoming_one = 1.0;

    // A feature already on the path is unwound and re-extended so each
    // feature appears once.
    int previous = 1;
    for (; previous <= depth; ++previous)
      if (path[previous].feature == n.feature) break;
    if (previous <= depth) {
      incoming_zero = path[previous].zero_fraction;
      incoming_one = path[previous].one_fraction;
      unwind_path(path, depth, previous);
      --depth;
    }
    recurse(hot, path, depth + 1, hot_fraction * incoming_zero, incoming_one, n.feature);
    recurse(cold, path, depth + 1, cold_fraction * incoming_zero, 0.0, n.feature);
  }

  const DecisionTree& tree_;
  std::vector<PathElement> arena_;
  const std::vector<double>* x_ = nullptr;
  std::vector<double>* phi_ = nullptr;
};

inline int tree_depth(const DecisionTree& tree) {
  std::vector<int> depth(tree.nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    if (n.is_leaf()) continue;
    depth[static_cast<std::size_t>(n.left)] = depth[static_cast<std::size_t>(n.right)] = depth[i] + 1;
    best = std::max(best, depth[i] + 1);
  }
  return best;
}

}  // namespace detail

/// Exact path-dependent TreeSHAP, averaged over the forest's trees.
inline AttributionMatrix tree_shap(const Forest& forest, const Eigen::MatrixXd& instances) {
  if (static_cast<std::size_t>(instances.cols()) != forest.n_features)
    throw Error(ErrorCode::kFeatureMismatch, "instances do not match the forest's feature count");
  const std::size_t n_features = forest.n_features;
  const std::size_t n_labels = forest.n_labels();
  AttributionMatrix out(static_cast<std::size_t>(instances.rows()), n_features, n_labels);
  if (forest.trees.empty()) return out;
  const double scale = 1.0 / static_cast<double>(forest.trees.size());

  for (const auto& tree : forest.trees) {
    const auto root = tree.value(0);
    for (std::size_t l = 0; l < n_labels; ++l) out.base_values()[l] += scale * root[l];
  }
  std::vector<int> depths;
  for (const auto& tree : forest.trees) depths.push_back(detail::tree_depth(tree));

  parallel_for(static_cast<std::size_t>(instances.rows()), [&](std::size_t i) {
    std::vector<double> row(n_features);
    for (std::size_t f = 0; f < n_features; ++f)
      row[f] = instances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
    std::vector<double> phi(n_features * n_labels, 0.0);
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      detail::TreeShapWalker walker(forest.trees[t], depths[t]);
      walker.explain(row, phi);
    }
    for (std::size_t f = 0; f < n_features; ++f)
      for (std::size_t l = 0; l < n_labels; ++l) out(i, f, l) = scale * phi[f * n_labels + l];
  });
  return out;
}

/// Mean over instances and labels of |attribution|, per feature.
inline std::vector<double> mean_abs_importance(const AttributionMatrix& att) {
  std::vector<double> importance(att.features(), 0.0);
  const double count = static_cast<double>(att.instances() * att.labels());
  if (count == 0) return importance;
  for (std::size_t f = 0; f < att.features(); ++f) {
    double s = 0.0;
    for (std::size_t i = 0; i < att.instances(); ++i)
      for (std::size_t l = 0; l < att.labels(); ++l) s += std::abs(att(i, f, l));
    importance[f] = s / count;
  }
  return importance;
}

struct SelectionResult {
  std::vector<std::size_t> selected_columns;  // descending importance
  std::size_t theta = 0;
  std::vector<double> importance;  // per input column
  bool all_zero = false;           // nothing to select; callers keep every column
};

/// Relative slack when comparing a prefix sum against the cutoff, so that
/// rounding in the running sum cannot add a column.
inline constexpr double kSelectionSlack = 1e-12;

/// Columns by descending importance (ties: lower index first); keeps the
/// shortest prefix whose importance sum reaches c times the total.
inline SelectionResult select_features(const std::vector<double>& importance, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorCode::kInvalidValue, "cutoff must lie in [0,1]");
  SelectionResult out;
  out.importance = importance;
  std::vector<std::size_t> order(importance.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });
  double total = 0.0;
  for (auto j : order) total += importance[j];
  if (!(total > 0.0)) {
    out.all_zero = true;
    return out;
  }
  const double cutoff = c * total - kSelectionSlack * total;
  double sum = 0.0;
  for (auto j : order) {
    out.selected_columns.push_back(j);
    sum += importance[j];
    if (sum >= cutoff) break;
  }
  out.theta = out.selected_columns.size();
  return out;
}

}  // namespace gcnhmc

#endif  // GCNHMC_EXPLAIN_HPP
