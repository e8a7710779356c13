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

// Hierarchical multi-label classification over one sub-hierarchy tree.
//
// Four strategies decompose the tree into classifier units:
//   lcn     one single-label unit per non-root term
//   lcpn    one unit per term with children, predicting its children;
//           trained only on genes annotated with that term
//   lcl     one unit per depth >= 1, predicting the terms at that depth
//   global  one unit predicting every non-root term
// Each unit is trained per cross-validation fold with SHAP-based feature
// selection, and the assembled out-of-fold probabilities are made
// consistent with the tree by multiplying along root-to-leaf paths.

#ifndef GCNHMC_HMC_HPP
#define GCNHMC_HMC_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/enrichment.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/explain.hpp"
#include "gcnhmc/learn.hpp"
#include "gcnhmc/ontology.hpp"

namespace gcnhmc {

enum class StrategyKind { kLcn, kLcpn, kLcl, kGlobal };

inline constexpr StrategyKind kAllStrategies[] = {StrategyKind::kLcn, StrategyKind::kLcpn,
                                                  StrategyKind::kLcl, StrategyKind::kGlobal};

inline std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kLcn: return "lcn";
    case StrategyKind::kLcpn: return "lcpn";
    case StrategyKind::kLcl: return "lcl";
    case StrategyKind::kGlobal: return "global";
  }
  return "?";
}

inline StrategyKind parse_strategy(std::string_view name) {
  for (auto kind : kAllStrategies)
    if (to_string(kind) == name) return kind;
  throw Error(ErrorCode::kInvalidValue, "unknown method '" + std::string(name) + "'");
}

struct ClassifierUnit {
  std::string id;
  std::vector<int> targets;  // local term indices
  int training_term = 0;     // training rows are genes annotated with this term
};

struct ClassifierPlan {
  StrategyKind kind = StrategyKind::kGlobal;
  std::vector<ClassifierUnit> units;
};

inline ClassifierPlan plan(StrategyKind kind, const SubHierarchy& sh) {
  ClassifierPlan p;
  p.kind = kind;
  const int n = static_cast<int>(sh.size());
  switch (kind) {
    case StrategyKind::kLcn:
      for (int t = 1; t < n; ++t) p.units.push_back({"node:" + sh.names[static_cast<std::size_t>(t)], {t}, 0});
      break;
    case StrategyKind::kLcpn:
      for (int t = 0; t < n; ++t) {
        auto kids = sh.children(t);
        if (!kids.empty())
          p.units.push_back({"parent:" + sh.names[static_cast<std::size_t>(t)], std::move(kids), t});
      }
      break;
    case StrategyKind::kLcl:
      for (int d = 1; d <= sh.depth(); ++d) {
        ClassifierUnit u{"level:" + std::to_string(d), {}, 0};
        for (int t = 1; t < n; ++t)
          if (sh.level[static_cast<std::size_t>(t)] == d) u.targets.push_back(t);
        p.units.push_back(std::move(u));
      }
      break;
    case StrategyKind::kGlobal: {
      ClassifierUnit u{"global", {}, 0};
      for (int t = 1; t < n; ++t) u.targets.push_back(t);
      if (!u.targets.empty()) p.units.push_back(std::move(u));
      break;
    }
  }
  return p;
}

/// Gene x term probabilities for one sub-hierarchy (psi).
struct PredictionTable {
  std::string root;
  std::vector<std::string> genes;
  std::vector<std::string> terms;  // local tree order, root first
  std::vector<int> parent;         // tree parent per term, -1 for the root
  Eigen::MatrixXd probs;           // genes x terms
  bool consistent = false;
};

/// Gene x local-term membership for the sub-hierarchy's genes.
inline LabelMatrix membership_labels(const SubHierarchy& sh, const AnnotationMap& ann) {
  LabelMatrix y = LabelMatrix::Zero(static_cast<Eigen::Index>(sh.genes.size()),
                                    static_cast<Eigen::Index>(sh.size()));
  for (std::size_t g = 0; g < sh.genes.size(); ++g)
    for (std::size_t t = 0; t < sh.size(); ++t)
      y(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(t)) = ann.has(sh.genes[g], sh.terms[t]);
  return y;
}

struct TrainOptions {
  ForestParams forest;
  double cutoff = 0.9;
  bool select_features = true;
};

struct SelectionRecord {
  std::string unit;
  int fold = 0;
  std::string column;
  double importance = 0.0;
  bool selected = false;
};

struct TrainLog {
  std::vector<SelectionRecord> selections;
  std::vector<std::string> warnings;
  std::size_t candidate_columns = 0;
};

namespace detail {

inline Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                              const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
  return out;
}

}  // namespace detail

/// Out-of-fold predictions of every non-root term. `features` rows and
/// `labels` rows follow `sh.genes`; `labels` columns follow the local term
/// order. Root probability is fixed at 1.
inline PredictionTable train_strategy(const ClassifierPlan& p, const SubHierarchy& sh,
                                      const FeatureMatrix& features, const LabelMatrix& labels,
                                      const FoldPlan& folds, const TrainOptions& options,
                                      TrainLog* log = nullptr) {
  const std::size_t n_genes = sh.genes.size();
  if (features.rows() != n_genes || static_cast<std::size_t>(labels.rows()) != n_genes ||
      folds.fold.size() != n_genes)
    throw Error(ErrorCode::kGeneSetMismatch, "features, labels and folds must cover the sub-hierarchy genes");
  if (static_cast<std::size_t>(labels.cols()) != sh.size())
    throw Error(ErrorCode::kInvalidValue, "label columns must follow the sub-hierarchy terms");

  PredictionTable table;
  table.root = sh.root_name();
  table.genes = features.genes;
  table.terms = sh.names;
  table.parent = sh.parent;
  table.probs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_genes), static_cast<Eigen::Index>(sh.size()));
  table.probs.col(0).setOnes();

  std::vector<std::vector<std::size_t>> unit_columns;
  std::set<std::size_t> all_candidates;
  for (const auto& unit : p.units) {
    std::set<std::string> names;
    for (int t : unit.targets) names.insert(sh.names[static_cast<std::size_t>(t)]);
    auto& cols = unit_columns.emplace_back();
    for (std::size_t c = 0; c < features.cols(); ++c)
      if (names.count(features.columns[c].term)) cols.push_back(c);
    if (cols.empty())
      for (std::size_t c = 0; c < features.cols(); ++c) cols.push_back(c);
    all_candidates.insert(cols.begin(), cols.end());
  }
  if (log) log->candidate_columns = all_candidates.size();

  for (int fold = 0; fold < folds.k; ++fold) {
    const auto test_rows = folds.members(fold);
    if (test_rows.empty()) continue;
    const auto train_all = folds.complement(fold);

    for (std::size_t u = 0; u < p.units.size(); ++u) {
      const auto& unit = p.units[u];
      std::vector<std::size_t> train_rows;
      for (auto r : train_all)
        if (labels(static_cast<Eigen::Index>(r), unit.training_term)) train_rows.push_back(r);

      LabelMatrix y(static_cast<Eigen::Index>(train_rows.size()), static_cast<Eigen::Index>(unit.targets.size()));
      bool constant = true;
      std::size_t positives = 0;
      for (std::size_t j = 0; j < unit.targets.size(); ++j) {
        std::size_t pos = 0;
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
          y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
              labels(static_cast<Eigen::Index>(train_rows[i]), unit.targets[j]);
          pos += y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        positives += pos;
        if (pos != 0 && pos != train_rows.size()) constant = false;
      }

      if (train_rows.empty() || constant) {
        // Nothing to learn: every target is constant on the training rows.
        if (log && positives == 0)
          log->warnings.push_back(std::string(to_string(p.kind)) + " " + unit.id + " fold " +
                                  std::to_string(fold) + ": no positive training rows");
        for (std::size_t j = 0; j < unit.targets.size(); ++j) {
          double value = 0.0;
          if (!train_rows.empty() && y(0, static_cast<Eigen::Index>(j))) value = 1.0;
          for (auto r : test_rows)
            table.probs(static_cast<Eigen::Index>(r), unit.targets[j]) = value;
        }
        continue;
      }

      const auto& candidates = unit_columns[u];
      std::vector<std::string> column_ids;
      for (auto c : candidates) column_ids.push_back(features.columns[c].id());
      std::vector<std::string> target_ids;
      for (int t : unit.targets) target_ids.push_back(sh.names[static_cast<std::size_t>(t)]);

      ForestParams params = options.forest;
      params.seed = derive_seed(options.forest.seed,
                                {tag_of(to_string(p.kind)), tag_of(unit.id), static_cast<std::uint64_t>(fold)});
      const Eigen::MatrixXd x_train = detail::gather(features.values, train_rows, candidates);

      std::vector<std::size_t> chosen(candidates.size());
      for (std::size_t j = 0; j < chosen.size(); ++j) chosen[j] = j;
      if (options.select_features) {
        const Forest full = fit(x_train, y, params, target_ids, column_ids);
        const auto importance = mean_abs_importance(tree_shap(full, x_train));
        const auto selection = select_features(importance, options.cutoff);
        if (!selection.all_zero) chosen = selection.selected_columns;
        if (log) {
          std::vector<char> is_selected(candidates.size(), selection.all_zero ? 1 : 0);
          for (auto j : selection.selected_columns) is_selected[j] = 1;
          for (std::size_t j = 0; j < candidates.size(); ++j)
            log->selections.push_back({unit.id, fold, column_ids[j], importance[j], is_selected[j] != 0});
        }
      }

      std::vector<std::string> kept_ids;
      std::vector<std::size_t> kept_columns;
      for (auto j : chosen) {
        kept_ids.push_back(column_ids[j]);
        kept_columns.push_back(candidates[j]);
      }
      ForestParams retrain = params;
      retrain.seed = derive_seed(params.seed, {tag_of("retrain")});
      const Forest model = fit(detail::gather(features.values, train_rows, kept_columns), y, retrain,
                               target_ids, kept_ids);
      const Eigen::MatrixXd proba = predict_proba(model, detail::gather(features.values, test_rows, kept_columns));
      for (std::size_t i = 0; i < test_rows.size(); ++i)
        for (std::size_t j = 0; j < unit.targets.size(); ++j)
          table.probs(static_cast<Eigen::Index>(test_rows[i]), unit.targets[j]) =
              proba(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return table;
}

/// Multiplies each probability by its (already updated) parent's, in
/// root-to-leaf order, so children never exceed their parents.
inline PredictionTable propagate(PredictionTable raw) {
  raw.probs.col(0).setOnes();
  for (std::size_t t = 1; t < raw.terms.size(); ++t) {
    const int p = raw.parent[t];
    if (p < 0 || static_cast<std::size_t>(p) >= t)
      throw Error(ErrorCode::kInternal, "terms must list parents before children");
    raw.probs.col(static_cast<Eigen::Index>(t)) =
        raw.probs.col(static_cast<Eigen::Index>(t)).cwiseProduct(raw.probs.col(p));
  }
  raw.consistent = true;
  return raw;
}

inline PredictionTable propagate(PredictionTable raw, const SubHierarchy& sh) {
  if (raw.terms != sh.names) throw Error(ErrorCode::kInvalidValue, "table terms do not match the tree");
  raw.parent = sh.parent;
  return propagate(std::move(raw));
}

/// Number of (gene, tree edge) pairs with child > parent + tolerance.
inline std::size_t count_violations(const PredictionTable& table, double tolerance = 1e-12) {
  std::size_t violations = 0;
  for (std::size_t t = 1; t < table.terms.size(); ++t)
    for (Eigen::Index g = 0; g < table.probs.rows(); ++g)
      if (table.probs(g, static_cast<Eigen::Index>(t)) >
          table.probs(g, table.parent[t]) + tolerance)
        ++violations;
  return violations;
}

}  // namespace gcnhmc

#endif  // GCNHMC_HMC_HPP
