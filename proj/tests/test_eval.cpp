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

TEST(PRCurve, PointsPerDistinctScore) {
  const auto c = pr_curve({0.9, 0.8, 0.3, 0.1}, {1, 1, 0, 0});
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c.recall, (std::vector<double>{0.5, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(c.precision[2], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.precision[3], 0.5);
  EXPECT_DOUBLE_EQ(auc(c), 1.0);
}

TEST(PRCurve, TiesShareOnePoint) {
  const auto c = pr_curve({0.5, 0.5, 0.5, 0.2}, {1, 0, 1, 0});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_DOUBLE_EQ(c.precision[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.recall[0], 1.0);
  EXPECT_DOUBLE_EQ(auc(c), 2.0 / 3.0);
}

TEST(PRCurve, ConstantScoresGivePrevalence) {
  EXPECT_DOUBLE_EQ(auc(pr_curve({0, 0, 0, 0, 0}, {1, 0, 0, 1, 0})), 0.4);
}

TEST(PRCurve, NoPositives) {
  try {
    pr_curve({0.1, 0.2}, {0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoPositives);
  }
  EXPECT_THROW(pr_curve({0.1}, {0, 1}), Error);
}

TEST(Auc, SinglePoint) {
  PRCurve c{{0.3}, {0.5}, {1.0}};
  EXPECT_DOUBLE_EQ(auc(c), 0.5);
}

TEST(Auc, ZeroRecallHasNoArea) {
  PRCurve c{{0.9, 0.5}, {0.0, 0.0}, {0.0, 0.0}};
  EXPECT_DOUBLE_EQ(auc(c), 0.0);
}

PredictionTable table(const std::vector<std::vector<double>>& rows) {
  PredictionTable t;
  t.root = "r";
  t.terms = {"r", "a", "b"};
  t.parent = {-1, 0, 0};
  t.probs.resize(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t g = 0; g < rows.size(); ++g) {
    t.genes.push_back("g" + std::to_string(g));
    for (int j = 0; j < 3; ++j) t.probs(static_cast<Eigen::Index>(g), j) = rows[g][static_cast<std::size_t>(j)];
  }
  return t;
}

LabelMatrix truth(const std::vector<std::vector<int>>& rows) {
  LabelMatrix y(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t g = 0; g < rows.size(); ++g)
    for (int j = 0; j < 3; ++j) y(static_cast<Eigen::Index>(g), j) = static_cast<std::uint8_t>(rows[g][static_cast<std::size_t>(j)]);
  return y;
}

TEST(MicroCurve, TwoGenesTwoTerms) {
  const auto t = table({{1, 0.9, 0.8}, {1, 0.7, 0.3}});
  const auto y = truth({{1, 1, 1}, {1, 1, 0}});
  const auto c = micro_curve(t, y);
  EXPECT_EQ(c.recall, (std::vector<double>{1.0 / 3, 2.0 / 3, 1, 1}));
  EXPECT_EQ(c.precision, (std::vector<double>{1, 1, 1, 0.75}));
  EXPECT_EQ(c.thresholds, (std::vector<double>{0.9, 0.8, 0.7, 0.3}));
  EXPECT_DOUBLE_EQ(auc(c), 1.0);
}

TEST(PerFunction, HalfWhenTopScoreIsWrong) {
  const auto t = table({{1, 0.9, 0.1}, {1, 0.8, 0.9}});
  const auto y = truth({{1, 0, 0}, {1, 1, 1}});
  EXPECT_DOUBLE_EQ(per_function_auprc(t, y, 1), 0.5);
  EXPECT_DOUBLE_EQ(per_function_auprc(t, y, 2), 1.0);
}

TEST(PerFunction, AllPositiveIsOne) {
  const auto t = table({{1, 0.2, 0.1}, {1, 0.7, 0.9}, {1, 0.4, 0.3}});
  const auto y = truth({{1, 1, 0}, {1, 1, 1}, {1, 1, 0}});
  EXPECT_DOUBLE_EQ(per_function_auprc(t, y, 1), 1.0);
}

TEST(PerFunction, TermWithoutPositives) {
  const auto t = table({{1, 0.2, 0.1}});
  try {
    per_function_auprc(t, truth({{1, 1, 0}}), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoPositivesForTerm);
  }
}

TEST(Aggregate, UniformAndFrequencyWeighted) {
  EXPECT_DOUBLE_EQ(aggregate({{1.0, 1}, {0.5, 1}}, WeightMode::kUniform), 0.75);
  EXPECT_DOUBLE_EQ(aggregate({{1.0, 1}, {0.5, 3}}, WeightMode::kFrequency), 0.625);
  EXPECT_DOUBLE_EQ(aggregate({{0.3, 2}}, WeightMode::kFrequency), 0.3);
  EXPECT_THROW(aggregate({}, WeightMode::kUniform), Error);
}

TEST(Evaluate, PerfectPredictor) {
  const auto t = table({{1, 1, 0}, {1, 0, 1}, {1, 1, 1}, {1, 0, 0}});
  const auto y = truth({{1, 1, 0}, {1, 0, 1}, {1, 1, 1}, {1, 0, 0}});
  const auto r = evaluate(t, y);
  EXPECT_DOUBLE_EQ(r.micro_auprc, 1.0);
  EXPECT_DOUBLE_EQ(r.macro_auprc, 1.0);
  EXPECT_DOUBLE_EQ(r.weighted_macro_auprc, 1.0);
}

TEST(Evaluate, RootIsIgnored) {
  // A root column of zeros would drag the pooled curve down if scored.
  auto t = table({{0, 1, 0}, {0, 0, 1}});
  const auto y = truth({{1, 1, 0}, {1, 0, 1}});
  EXPECT_DOUBLE_EQ(evaluate(t, y).micro_auprc, 1.0);
}

TEST(Evaluate, AllZeroPredictionsScorePrevalence) {
  const auto t = table({{1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {1, 0, 0}});
  const auto y = truth({{1, 1, 0}, {1, 0, 0}, {1, 0, 1}, {1, 0, 0}});
  const auto r = evaluate(t, y);
  EXPECT_DOUBLE_EQ(r.micro_auprc, 0.25);
  EXPECT_DOUBLE_EQ(r.macro_auprc, 0.25);
}

TEST(Evaluate, SkipsTermsWithoutPositives) {
  const auto t = table({{1, 0.9, 0.5}, {1, 0.1, 0.5}});
  const auto y = truth({{1, 1, 0}, {1, 0, 0}});
  const auto r = evaluate(t, y);
  EXPECT_EQ(r.skipped, (std::vector<std::string>{"b"}));
  EXPECT_EQ(r.per_function_auprc.size(), 1u);
  EXPECT_DOUBLE_EQ(r.weights.at("a"), 1.0);
}

TEST(Evaluate, WeightsFollowPositiveCounts) {
  const auto t = table({{1, 0.9, 0.9}, {1, 0.8, 0.1}, {1, 0.1, 0.2}, {1, 0.2, 0.3}});
  const auto y = truth({{1, 1, 0}, {1, 1, 0}, {1, 1, 1}, {1, 0, 0}});
  const auto r = evaluate(t, y);
  EXPECT_DOUBLE_EQ(r.weights.at("a"), 0.75);
  EXPECT_DOUBLE_EQ(r.weights.at("b"), 0.25);
  EXPECT_NEAR(r.weighted_macro_auprc, 0.75 * r.per_function_auprc.at("a") + 0.25 * r.per_function_auprc.at("b"),
              1e-15);
}

TEST(Evaluate, RandomScoresNearPrevalence) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit;
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;
  for (int i = 0; i < 20000; ++i) {
    scores.push_back(unit(rng));
    labels.push_back(unit(rng) < 0.2);
  }
  EXPECT_NEAR(auc(pr_curve(scores, labels)), 0.2, 0.02);
}

TEST(Evaluate, TruthFromAnnotations) {
  const auto h = testing::hierarchy({{"a", "r"}, {"b", "r"}});
  const auto ann = testing::annotations({{"g0", {"a"}}, {"g1", {"b"}}}, h);
  auto t = table({{1, 0.5, 0.5}, {1, 0.5, 0.5}});
  EXPECT_EQ(truth_for(t, ann, h), truth({{1, 1, 0}, {1, 0, 1}}));
  t.genes[1] = "zz";
  EXPECT_THROW(truth_for(t, ann, h), Error);
}

}  // namespace
}  // namespace gcnhmc
