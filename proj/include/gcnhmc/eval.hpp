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

// Precision-recall evaluation of hierarchical predictions: the pooled
// (micro) PR curve over all gene/term pairs, per-term PR curves and their
// uniform and frequency-weighted means. The root term is never scored.

#ifndef GCNHMC_EVAL_HPP
#define GCNHMC_EVAL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gcnhmc/error.hpp"
#include "gcnhmc/hmc.hpp"
#include "gcnhmc/learn.hpp"
#include "gcnhmc/ontology.hpp"

namespace gcnhmc {

/// Points ordered by decreasing threshold; recall is non-decreasing.
struct PRCurve {
  std::vector<double> thresholds;
  std::vector<double> precision;
  std::vector<double> recall;

  std::size_t size() const { return thresholds.size(); }
};

/// One point per distinct score: everything scored >= threshold is
/// predicted positive.
inline PRCurve pr_curve(const std::vector<double>& scores, const std::vector<std::uint8_t>& truth) {
  if (scores.size() != truth.size()) throw Error(ErrorCode::kInvalidValue, "score/truth size mismatch");
  const auto positives = static_cast<double>(std::count(truth.begin(), truth.end(), 1));
  if (positives == 0) throw Error(ErrorCode::kNoPositives, "no positive pairs to score");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  PRCurve curve;
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (truth[order[i]]) tp += 1;
    else fp += 1;
    if (i + 1 < order.size() && scores[order[i + 1]] == scores[order[i]]) continue;
    curve.thresholds.push_back(scores[order[i]]);
    curve.precision.push_back(tp / (tp + fp));
    curve.recall.push_back(tp / positives);
  }
  return curve;
}

/// Step-wise area: sum of (R_i - R_{i-1}) * P_i with R_0 = 0.
inline double auc(const PRCurve& curve) {
  double area = 0.0, previous = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    area += (curve.recall[i] - previous) * curve.precision[i];
    previous = curve.recall[i];
  }
  return std::clamp(area, 0.0, 1.0);
}

/// Truth matrix aligned with `table` (genes x terms) from closed annotations.
inline LabelMatrix truth_for(const PredictionTable& table, const AnnotationMap& ann, const Hierarchy& h) {
  LabelMatrix truth = LabelMatrix::Zero(static_cast<Eigen::Index>(table.genes.size()),
                                        static_cast<Eigen::Index>(table.terms.size()));
  for (std::size_t t = 0; t < table.terms.size(); ++t) {
    auto term = h.terms().find(table.terms[t]);
    if (!term) throw Error(ErrorCode::kUnknownTerm, table.terms[t]);
    for (std::size_t g = 0; g < table.genes.size(); ++g) {
      auto gene = ann.genes().find(table.genes[g]);
      if (!gene) throw Error(ErrorCode::kUnknownGene, table.genes[g]);
      truth(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(t)) = ann.has(*gene, *term);
    }
  }
  return truth;
}

namespace detail {

inline bool is_root_column(const PredictionTable& table, std::size_t t) {
  return table.parent.empty() ? t == 0 : table.parent[t] < 0;
}

}  // namespace detail

/// Pooled curve over every (gene, non-root term) pair.
inline PRCurve micro_curve(const PredictionTable& pred, const LabelMatrix& truth) {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (std::size_t t = 0; t < pred.terms.size(); ++t) {
    if (detail::is_root_column(pred, t)) continue;
    for (Eigen::Index g = 0; g < pred.probs.rows(); ++g) {
      scores.push_back(pred.probs(g, static_cast<Eigen::Index>(t)));
      labels.push_back(truth(g, static_cast<Eigen::Index>(t)));
    }
  }
  return pr_curve(scores, labels);
}

inline PRCurve function_curve(const PredictionTable& pred, const LabelMatrix& truth, std::size_t term) {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (Eigen::Index g = 0; g < pred.probs.rows(); ++g) {
    scores.push_back(pred.probs(g, static_cast<Eigen::Index>(term)));
    labels.push_back(truth(g, static_cast<Eigen::Index>(term)));
  }
  if (std::count(labels.begin(), labels.end(), 1) == 0)
    throw Error(ErrorCode::kNoPositivesForTerm, pred.terms.at(term) + " has no positive genes");
  return pr_curve(scores, labels);
}

inline double per_function_auprc(const PredictionTable& pred, const LabelMatrix& truth, std::size_t term) {
  return auc(function_curve(pred, truth, term));
}

enum class WeightMode { kUniform, kFrequency };

/// `per_function` holds (AUPRC, positive count) per scored term.
inline double aggregate(const std::vector<std::pair<double, double>>& per_function, WeightMode mode) {
  if (per_function.empty()) throw Error(ErrorCode::kNoPositives, "no scored functions");
  double total = 0.0, weights = 0.0;
  for (auto [area, count] : per_function) {
    const double w = mode == WeightMode::kUniform ? 1.0 : count;
    total += w * area;
    weights += w;
  }
  return total / weights;
}

struct MetricReport {
  double micro_auprc = 0.0;
  double macro_auprc = 0.0;
  double weighted_macro_auprc = 0.0;
  std::map<std::string, double> per_function_auprc;
  std::map<std::string, double> weights;
  std::vector<std::string> skipped;  // terms without positives
};

inline MetricReport evaluate(const PredictionTable& pred, const LabelMatrix& truth) {
  MetricReport report;
  report.micro_auprc = auc(micro_curve(pred, truth));
  std::vector<std::pair<double, double>> scored;
  double total_count = 0.0;
  for (std::size_t t = 0; t < pred.terms.size(); ++t) {
    if (detail::is_root_column(pred, t)) continue;
    const double count = static_cast<double>((truth.col(static_cast<Eigen::Index>(t)).array() != 0).count());
    if (count == 0) {
      report.skipped.push_back(pred.terms[t]);
      continue;
    }
    const double area = per_function_auprc(pred, truth, t);
    report.per_function_auprc[pred.terms[t]] = area;
    report.weights[pred.terms[t]] = count;
    total_count += count;
    scored.emplace_back(area, count);
  }
  for (auto& [_, w] : report.weights) w /= total_count;
  report.macro_auprc = aggregate(scored, WeightMode::kUniform);
  report.weighted_macro_auprc = aggregate(scored, WeightMode::kFrequency);
  return report;
}

}  // namespace gcnhmc

#endif  // GCNHMC_EVAL_HPP
