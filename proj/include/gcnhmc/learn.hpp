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

// Multi-output random forest classifier and multi-label stratified k-fold
// splitting.
//
// Trees are CART trees grown on bootstrap samples. A single tree predicts
// every label at once: the split criterion is the Gini impurity summed over
// labels and each leaf stores the (bootstrap-weighted) fraction of positive
// samples per label.

#ifndef GCNHMC_LEARN_HPP
#define GCNHMC_LEARN_HPP

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/error.hpp"

namespace gcnhmc {

using LabelMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct ForestParams {
  int n_trees = 200;
  int min_samples_split = 5;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  /// Features tried per split: ceil(sqrt(n_features)).
  static int max_features(std::size_t n_features) {
    return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_features)))));
  }

  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double cover = 0.0;  // bootstrap-weighted training samples reaching the node

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
  std::vector<double> values;  // nodes.size() x n_labels, positive fractions
  int n_labels = 0;

  std::span<const double> value(std::size_t node) const {
    return {values.data() + node * static_cast<std::size_t>(n_labels),
            static_cast<std::size_t>(n_labels)};
  }

  template <typename Row>
  std::size_t leaf_for(const Row& x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf())
      i = static_cast<std::size_t>(x(nodes[i].feature) <= nodes[i].threshold ? nodes[i].left
                                                                             : nodes[i].right);
    return i;
  }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct Forest {
  ForestParams params;
  std::vector<DecisionTree> trees;
  std::vector<std::string> label_ids;
  std::vector<std::string> feature_ids;
  std::size_t n_features = 0;

  std::size_t n_labels() const { return label_ids.size(); }
  friend bool operator==(const Forest&, const Forest&) = default;
};

namespace detail {

struct NodeStats {
  double weight = 0.0;
  std::vector<double> positive;

  double impurity_mass() const {  // weight * sum_l gini_l / 2
    if (weight <= 0.0) return 0.0;
    double s = 0.0;
    for (double p : positive) s += p * (weight - p);
    return s / weight;
  }
};

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& x, const LabelMatrix& y, int min_split, std::mt19937_64& rng)
      : x_(x), y_(y), min_split_(min_split), rng_(rng),
        n_labels_(static_cast<int>(y.cols())),
        mtry_(ForestParams::max_features(static_cast<std::size_t>(x.cols()))) {}

  DecisionTree grow(const std::vector<int>& rows, const std::vector<double>& weights) {
    DecisionTree tree;
    tree.n_labels = n_labels_;
    weights_ = weights;
    struct Pending {
      std::size_t node;
      std::vector<int> rows;
    };
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, rows});
    while (!stack.empty()) {
      Pending job = std::move(stack.back());
      stack.pop_back();
      const NodeStats stats = node_stats(job.rows);
      tree.nodes[job.node].cover = stats.weight;
      tree.values.resize(tree.nodes.size() * static_cast<std::size_t>(n_labels_));
      for (int l = 0; l < n_labels_; ++l)
        tree.values[job.node * static_cast<std::size_t>(n_labels_) + static_cast<std::size_t>(l)] =
            stats.weight > 0 ? stats.positive[static_cast<std::size_t>(l)] / stats.weight : 0.0;

      if (static_cast<int>(job.rows.size()) < min_split_ || stats.impurity_mass() <= 1e-12) continue;
      auto split = best_split(job.rows, stats);
      if (split.feature < 0) continue;

      std::vector<int> left, right;
      for (int r : job.rows) (x_(r, split.feature) <= split.threshold ? left : right).push_back(r);
      const auto left_id = tree.nodes.size();
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      auto& node = tree.nodes[job.node];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = static_cast<int>(left_id);
      node.right = static_cast<int>(left_id + 1);
      tree.values.resize(tree.nodes.size() * static_cast<std::size_t>(n_labels_));
      stack.push_back({left_id + 1, std::move(right)});
      stack.push_back({left_id, std::move(left)});
    }
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = -1.0;
  };

  NodeStats node_stats(const std::vector<int>& rows) const {
    NodeStats s;
    s.positive.assign(static_cast<std::size_t>(n_labels_), 0.0);
    for (int r : rows) {
      const double w = weights_[static_cast<std::size_t>(r)];
      s.weight += w;
      for (int l = 0; l < n_labels_; ++l)
        if (y_(r, l)) s.positive[static_cast<std::size_t>(l)] += w;
    }
    return s;
  }

  Split best_split(const std::vector<int>& rows, const NodeStats& parent) {
    const int n_features = static_cast<int>(x_.cols());
    std::vector<int> order(static_cast<std::size_t>(n_features));
    std::iota(order.begin(), order.end(), 0);
    const double parent_mass = parent.impurity_mass();

    Split best;
    int evaluated = 0;
    std::vector<std::pair<double, int>> sorted(rows.size());
    std::vector<double> left_pos(static_cast<std::size_t>(n_labels_));
    for (int drawn = 0; drawn < n_features && evaluated < mtry_; ++drawn) {
      std::uniform_int_distribution<int> pick(drawn, n_features - 1);
      std::swap(order[static_cast<std::size_t>(drawn)], order[static_cast<std::size_t>(pick(rng_))]);
      const int f = order[static_cast<std::size_t>(drawn)];

      for (std::size_t i = 0; i < rows.size(); ++i) sorted[i] = {x_(rows[i], f), rows[i]};
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front().first == sorted.back().first) continue;  // constant here
      ++evaluated;

      std::fill(left_pos.begin(), left_pos.end(), 0.0);
      double left_w = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const int r = sorted[i].second;
        const double w = weights_[static_cast<std::size_t>(r)];
        left_w += w;
        for (int l = 0; l < n_labels_; ++l)
          if (y_(r, l)) left_pos[static_cast<std::size_t>(l)] += w;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double right_w = parent.weight - left_w;
        double mass = 0.0;
        for (int l = 0; l < n_labels_; ++l) {
          const double lp = left_pos[static_cast<std::size_t>(l)];
          const double rp = parent.positive[static_cast<std::size_t>(l)] - lp;
          if (left_w > 0) mass += lp * (left_w - lp) / left_w;
          if (right_w > 0) mass += rp * (right_w - rp) / right_w;
        }
        const double gain = std::max(0.0, parent_mass - mass);
        if (gain > best.gain) {
          double threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
          if (!(threshold < sorted[i + 1].first)) threshold = sorted[i].first;
          best = {f, threshold, gain};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  const LabelMatrix& y_;
  int min_split_;
  std::mt19937_64& rng_;
  int n_labels_;
  int mtry_;
  std::vector<double> weights_;
};

}  // namespace detail

/// Trains params.n_trees trees; tree t draws its bootstrap sample and feature
/// subsets from a stream derived from (seed, t), so the forest does not
/// depend on the worker count.
inline Forest fit(const Eigen::MatrixXd& features, const LabelMatrix& labels,
                  const ForestParams& params, std::vector<std::string> label_ids = {},
                  std::vector<std::string> feature_ids = {}) {
  if (features.rows() != labels.rows())
    throw Error(ErrorCode::kFeatureMismatch, "feature and label row counts differ");
  if (features.rows() == 0) throw Error(ErrorCode::kTooFewSamples, "no training rows");
  if (params.n_trees < 1 || params.min_samples_split < 2)
    throw Error(ErrorCode::kInvalidValue, "invalid forest parameters");
  if (label_ids.empty())
    for (Eigen::Index l = 0; l < labels.cols(); ++l) label_ids.push_back(std::to_string(l));
  if (feature_ids.empty())
    for (Eigen::Index f = 0; f < features.cols(); ++f) feature_ids.push_back(std::to_string(f));
  if (label_ids.size() != static_cast<std::size_t>(labels.cols()) ||
      feature_ids.size() != static_cast<std::size_t>(features.cols()))
    throw Error(ErrorCode::kFeatureMismatch, "id lists do not match matrix shapes");

  Forest forest;
  forest.params = params;
  forest.label_ids = std::move(label_ids);
  forest.feature_ids = std::move(feature_ids);
  forest.n_features = static_cast<std::size_t>(features.cols());
  forest.trees.resize(static_cast<std::size_t>(params.n_trees));

  const auto n = static_cast<int>(features.rows());
  parallel_for(forest.trees.size(), [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(params.seed, {tag_of("tree"), t}));
    std::vector<double> weights(static_cast<std::size_t>(n), params.bootstrap ? 0.0 : 1.0);
    if (params.bootstrap) {
      std::uniform_int_distribution<int> draw(0, n - 1);
      for (int i = 0; i < n; ++i) weights[static_cast<std::size_t>(draw(rng))] += 1.0;
    }
    std::vector<int> rows;
    for (int i = 0; i < n; ++i)
      if (weights[static_cast<std::size_t>(i)] > 0) rows.push_back(i);
    detail::TreeBuilder builder(features, labels, params.min_samples_split, rng);
    forest.trees[t] = builder.grow(rows, weights);
  });
  return forest;
}

/// Mean over trees of the leaf positive fractions; rows x labels.
inline Eigen::MatrixXd predict_proba(const Forest& forest, const Eigen::MatrixXd& features) {
  if (static_cast<std::size_t>(features.cols()) != forest.n_features) {
    throw Error(ErrorCode::kFeatureMismatch, "forest expects " + std::to_string(forest.n_features) +
                                                 " features, got " + std::to_string(features.cols()));
  }
  const auto n_labels = static_cast<Eigen::Index>(forest.n_labels());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(features.rows(), n_labels);
  parallel_for(static_cast<std::size_t>(features.rows()), [&](std::size_t r) {
    const auto row = features.row(static_cast<Eigen::Index>(r));
    for (const auto& tree : forest.trees) {
      const auto v = tree.value(tree.leaf_for(row));
      for (Eigen::Index l = 0; l < n_labels; ++l) out(static_cast<Eigen::Index>(r), l) += v[static_cast<std::size_t>(l)];
    }
  });
  if (!forest.trees.empty()) out /= static_cast<double>(forest.trees.size());
  return out;
}

// --- serialization ----------------------------------------------------------

inline nlohmann::json to_json(const Forest& forest) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : forest.trees) {
    nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                   left = nlohmann::json::array(), right = nlohmann::json::array(),
                   cover = nlohmann::json::array();
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      cover.push_back(n.cover);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left},
                     {"right", right}, {"cover", cover}, {"values", t.values},
                     {"n_labels", t.n_labels}});
  }
  return {{"format", "gcnhmc-forest"},
          {"version", 1},
          {"params",
           {{"n_trees", forest.params.n_trees},
            {"min_samples_split", forest.params.min_samples_split},
            {"bootstrap", forest.params.bootstrap},
            {"seed", forest.params.seed}}},
          {"label_ids", forest.label_ids},
          {"feature_ids", forest.feature_ids},
          {"n_features", forest.n_features},
          {"trees", trees}};
}

inline Forest forest_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "gcnhmc-forest" || j.value("version", 0) != 1)
    throw Error(ErrorCode::kMalformedLine, "not a version 1 forest model");
  Forest f;
  const auto& p = j.at("params");
  f.params.n_trees = p.at("n_trees").get<int>();
  f.params.min_samples_split = p.at("min_samples_split").get<int>();
  f.params.bootstrap = p.at("bootstrap").get<bool>();
  f.params.seed = p.at("seed").get<std::uint64_t>();
  f.label_ids = j.at("label_ids").get<std::vector<std::string>>();
  f.feature_ids = j.at("feature_ids").get<std::vector<std::string>>();
  f.n_features = j.at("n_features").get<std::size_t>();
  for (const auto& t : j.at("trees")) {
    DecisionTree tree;
    tree.n_labels = t.at("n_labels").get<int>();
    tree.values = t.at("values").get<std::vector<double>>();
    const auto& feature = t.at("feature");
    for (std::size_t i = 0; i < feature.size(); ++i) {
      tree.nodes.push_back({feature[i].get<int>(), t.at("threshold")[i].get<double>(),
                            t.at("left")[i].get<int>(), t.at("right")[i].get<int>(),
                            t.at("cover")[i].get<double>()});
    }
    f.trees.push_back(std::move(tree));
  }
  return f;
}

// --- cross-validation folds -------------------------------------------------

struct FoldPlan {
  int k = 0;
  std::vector<int> fold;  // per sample, in [0, k)

  std::vector<std::size_t> members(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] == f) out.push_back(i);
    return out;
  }
  std::vector<std::size_t> complement(int f) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold.size(); ++i)
      if (fold[i] != f) out.push_back(i);
    return out;
  }
};

/// Iterative stratification for multi-label data. Labels are handled rarest
/// first; each sample carrying the current label goes to the fold with the
/// largest remaining demand for that label (ties: largest remaining size,
/// then lowest index). Fold sizes are capped so they differ by at most one.
inline FoldPlan stratified_kfold(const LabelMatrix& labels, int k_folds, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(labels.rows());
  if (k_folds < 2) throw Error(ErrorCode::kInvalidValue, "need at least 2 folds");
  if (static_cast<std::size_t>(k_folds) > n)
    throw Error(ErrorCode::kTooFewSamples, std::to_string(n) + " samples for " +
                                               std::to_string(k_folds) + " folds");
  const auto k = static_cast<std::size_t>(k_folds);
  const auto n_labels = static_cast<std::size_t>(labels.cols());

  std::mt19937_64 rng(derive_seed(seed, {tag_of("folds")}));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t base = n / k, extra = n % k;
  std::vector<std::size_t> size(k, 0);
  std::size_t at_ceiling = 0;
  auto eligible = [&](std::size_t f) {
    return size[f] < base || (size[f] == base && at_ceiling < extra);
  };

  std::vector<double> demand_size(k, static_cast<double>(n) / static_cast<double>(k));
  std::vector<std::vector<double>> demand(n_labels, std::vector<double>(k));
  std::vector<std::size_t> remaining(n_labels, 0);
  for (std::size_t l = 0; l < n_labels; ++l) {
    for (std::size_t i = 0; i < n; ++i) remaining[l] += labels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) ? 1 : 0;
    for (auto& d : demand[l]) d = static_cast<double>(remaining[l]) / static_cast<double>(k);
  }

  FoldPlan plan;
  plan.k = k_folds;
  plan.fold.assign(n, -1);
  auto assign = [&](std::size_t sample, std::size_t f) {
    plan.fold[sample] = static_cast<int>(f);
    if (size[f] == base) ++at_ceiling;
    ++size[f];
    demand_size[f] -= 1.0;
    for (std::size_t l = 0; l < n_labels; ++l)
      if (labels(static_cast<Eigen::Index>(sample), static_cast<Eigen::Index>(l))) {
        demand[l][f] -= 1.0;
        --remaining[l];
      }
  };
  auto choose = [&](const std::vector<double>* label_demand) {
    std::size_t best = k;
    for (std::size_t f = 0; f < k; ++f) {
      if (!eligible(f)) continue;
      if (best == k) {
        best = f;
        continue;
      }
      const double a = label_demand ? (*label_demand)[f] : 0.0;
      const double b = label_demand ? (*label_demand)[best] : 0.0;
      if (a > b || (a == b && demand_size[f] > demand_size[best])) best = f;
    }
    return best;
  };

  for (;;) {
    std::size_t label = n_labels;
    for (std::size_t l = 0; l < n_labels; ++l)
      if (remaining[l] > 0 && (label == n_labels || remaining[l] < remaining[label])) label = l;
    if (label == n_labels) break;
    for (std::size_t s : order) {
      if (plan.fold[s] >= 0 || !labels(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(label))) continue;
      assign(s, choose(&demand[label]));
    }
  }
  for (std::size_t s : order)
    if (plan.fold[s] < 0) assign(s, choose(nullptr));
  return plan;
}

}  // namespace gcnhmc

#endif  // GCNHMC_LEARN_HPP
