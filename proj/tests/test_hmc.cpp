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

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

namespace gcnhmc {
namespace {

using testing::annotations;
using testing::hierarchy;

SubHierarchy tree_of(const Hierarchy& h, const AnnotationMap& ann) { return dag_to_tree(h, *h.terms().find("r"), ann); }

std::size_t units(StrategyKind kind, const SubHierarchy& sh) { return plan(kind, sh).units.size(); }

TEST(Plan, ChainCounts) {
  const auto h = hierarchy({{"a", "r"}, {"b", "a"}});
  const auto sh = tree_of(h, annotations({{"g", {"b"}}}, h));
  EXPECT_EQ(units(StrategyKind::kLcn, sh), 2u);
  EXPECT_EQ(units(StrategyKind::kLcpn, sh), 2u);
  EXPECT_EQ(units(StrategyKind::kLcl, sh), 2u);
  EXPECT_EQ(units(StrategyKind::kGlobal, sh), 1u);
}

TEST(Plan, StarCounts) {
  const auto h = hierarchy({{"a", "r"}, {"b", "r"}, {"c", "r"}, {"d", "r"}, {"e", "r"}});
  const auto sh = tree_of(h, annotations({{"g", {"a", "b", "c", "d", "e"}}}, h));
  EXPECT_EQ(units(StrategyKind::kLcn, sh), 5u);
  EXPECT_EQ(units(StrategyKind::kLcpn, sh), 1u);
  EXPECT_EQ(units(StrategyKind::kLcl, sh), 1u);
  EXPECT_EQ(units(StrategyKind::kGlobal, sh), 1u);
  EXPECT_EQ(plan(StrategyKind::kLcpn, sh).units[0].targets.size(), 5u);
}

TEST(Plan, TwoLevelBinaryCounts) {
  const auto h = hierarchy({{"a", "r"}, {"b", "r"}, {"a1", "a"}, {"a2", "a"}, {"b1", "b"}, {"b2", "b"}});
  const auto sh = tree_of(h, annotations({{"g", {"a1", "a2", "b1", "b2"}}}, h));
  EXPECT_EQ(units(StrategyKind::kLcn, sh), 6u);
  EXPECT_EQ(units(StrategyKind::kLcpn, sh), 3u);
  EXPECT_EQ(units(StrategyKind::kLcl, sh), 2u);
  EXPECT_EQ(units(StrategyKind::kGlobal, sh), 1u);
  // Parent units train on the parent's genes only.
  for (const auto& u : plan(StrategyKind::kLcpn, sh).units)
    for (int t : u.targets) EXPECT_EQ(sh.parent[static_cast<std::size_t>(t)], u.training_term);
}

TEST(Plan, StrategyNames) {
  for (auto kind : kAllStrategies) EXPECT_EQ(parse_strategy(to_string(kind)), kind);
  EXPECT_THROW(parse_strategy("flat"), Error);
}

PredictionTable chain_table(std::vector<double> row) {
  PredictionTable t;
  t.root = "r";
  t.genes = {"g"};
  t.terms = {"r", "a", "b"};
  t.parent = {-1, 0, 1};
  t.probs = Eigen::Map<Eigen::RowVectorXd>(row.data(), 3);
  return t;
}

TEST(Propagate, MultipliesDownThePath) {
  const auto out = propagate(chain_table({1.0, 0.9, 0.8}));
  EXPECT_DOUBLE_EQ(out.probs(0, 1), 0.9);
  EXPECT_DOUBLE_EQ(out.probs(0, 2), 0.9 * 0.8);
  EXPECT_TRUE(out.consistent);
}

TEST(Propagate, ChildAboveParentIsPulledDown) {
  const auto raw = chain_table({1.0, 0.5, 0.9});
  EXPECT_EQ(count_violations(raw), 1u);
  const auto out = propagate(raw);
  EXPECT_DOUBLE_EQ(out.probs(0, 2), 0.45);
  EXPECT_EQ(count_violations(out), 0u);
}

TEST(Propagate, OnesAreFixed) {
  const auto out = propagate(chain_table({1.0, 1.0, 1.0}));
  EXPECT_EQ(out.probs, Eigen::RowVector3d(1, 1, 1));
}

TEST(Propagate, RandomTablesBecomeConsistent) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit;
  PredictionTable t;
  t.terms = {"r", "a", "b", "c", "d", "e"};
  t.parent = {-1, 0, 0, 1, 1, 3};
  t.probs.resize(40, 6);
  for (int g = 0; g < 40; ++g)
    for (int j = 0; j < 6; ++j) t.probs(g, j) = unit(rng);
  const auto out = propagate(t);
  EXPECT_EQ(count_violations(out), 0u);
  EXPECT_TRUE((out.probs.col(0).array() == 1.0).all());
}

TEST(Propagate, ParentsMustComeFirst) {
  auto t = chain_table({1.0, 0.5, 0.5});
  t.parent = {-1, 2, 0};
  EXPECT_THROW(propagate(t), Error);
}

struct Separable {
  Hierarchy h;
  AnnotationMap ann;
  SubHierarchy sh;
  FeatureMatrix features;
  LabelMatrix labels;
};

// Each gene sits under one leaf; every non-root term has a noisy indicator
// column.
Separable separable(int n_genes, double noise, std::uint64_t seed) {
  Separable s;
  s.h = hierarchy({{"a", "r"}, {"b", "r"}, {"a1", "a"}, {"a2", "a"}, {"b1", "b"}, {"b2", "b"}});
  const std::vector<std::string> leaves{"a1", "a2", "b1", "b2"};
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  for (int g = 0; g < n_genes; ++g)
    rows.push_back({"g" + std::to_string(100 + g), {leaves[static_cast<std::size_t>(g % 4)]}});
  s.ann = annotations(rows, s.h);
  s.sh = tree_of(s.h, s.ann);
  s.labels = membership_labels(s.sh, s.ann);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, noise);
  for (auto g : s.sh.genes) s.features.genes.push_back(s.ann.genes().name(g));
  for (std::size_t t = 1; t < s.sh.size(); ++t) s.features.columns.push_back({GraphTag::kG, s.sh.names[t], 2});
  s.features.values.resize(static_cast<Eigen::Index>(s.sh.genes.size()),
                           static_cast<Eigen::Index>(s.features.columns.size()));
  for (Eigen::Index g = 0; g < s.features.values.rows(); ++g)
    for (Eigen::Index c = 0; c < s.features.values.cols(); ++c)
      s.features.values(g, c) = s.labels(g, c + 1) + gauss(rng);
  return s;
}

TrainOptions quick_options() {
  TrainOptions o;
  o.forest.n_trees = 30;
  o.forest.seed = 4;
  return o;
}

TEST(TrainStrategy, EveryStrategyLearnsSeparableData) {
  const auto s = separable(80, 0.3, 6);
  const auto folds = stratified_kfold(s.labels, 5, 3);
  for (auto kind : kAllStrategies) {
    TrainLog log;
    const auto raw = train_strategy(plan(kind, s.sh), s.sh, s.features, s.labels, folds, quick_options(), &log);
    EXPECT_TRUE((raw.probs.col(0).array() == 1.0).all());
    const auto table = propagate(raw, s.sh);
    EXPECT_EQ(count_violations(table), 0u);
    const auto report = evaluate(table, s.labels);
    EXPECT_GE(report.micro_auprc, 0.8) << to_string(kind);
    EXPECT_GE(report.macro_auprc, 0.8) << to_string(kind);
    EXPECT_FALSE(log.selections.empty());
  }
}

TEST(TrainStrategy, AlwaysPositiveTermPredictsOne) {
  const auto h = hierarchy({{"a", "r"}, {"b", "a"}});
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  for (int g = 0; g < 20; ++g) rows.push_back({"g" + std::to_string(g), g % 2 ? std::vector<std::string>{"b"}
                                                                             : std::vector<std::string>{"a"}});
  const auto ann = annotations(rows, h);
  const auto sh = tree_of(h, ann);
  const auto labels = membership_labels(sh, ann);
  FeatureMatrix f;
  for (auto g : sh.genes) f.genes.push_back(ann.genes().name(g));
  f.columns = {{GraphTag::kG, "a", 2}, {GraphTag::kG, "b", 2}};
  f.values.resize(20, 2);
  for (Eigen::Index g = 0; g < 20; ++g) {
    f.values(g, 0) = 0.5;
    f.values(g, 1) = labels(g, 2);
  }
  const auto folds = stratified_kfold(labels, 4, 1);
  for (auto kind : kAllStrategies) {
    const auto raw = train_strategy(plan(kind, sh), sh, f, labels, folds, quick_options());
    const int a = sh.local_index(*h.terms().find("a"));
    EXPECT_TRUE((raw.probs.col(a).array() == 1.0).all()) << to_string(kind);
  }
}

TEST(TrainStrategy, DeterministicForSeed) {
  const auto s = separable(40, 0.5, 1);
  const auto folds = stratified_kfold(s.labels, 4, 3);
  const auto p = plan(StrategyKind::kLcpn, s.sh);
  const auto a = train_strategy(p, s.sh, s.features, s.labels, folds, quick_options());
  const auto b = train_strategy(p, s.sh, s.features, s.labels, folds, quick_options());
  EXPECT_EQ(a.probs, b.probs);
}

TEST(TrainStrategy, RowMismatch) {
  const auto s = separable(40, 0.5, 1);
  const auto folds = stratified_kfold(s.labels, 4, 3);
  auto f = s.features.slice({0, 1, 2}, {0, 1});
  EXPECT_THROW(train_strategy(plan(StrategyKind::kGlobal, s.sh), s.sh, f, s.labels, folds, quick_options()), Error);
}

}  // namespace
}  // namespace gcnhmc
