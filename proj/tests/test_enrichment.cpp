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

#include <cmath>

#include "fixtures.hpp"

namespace gcnhmc {
namespace {

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

TEST(HypergeomTail, ZeroOverlapIsOne) {
  EXPECT_EQ(hypergeom_tail(0, 20, 5, 5), 1.0);
  EXPECT_EQ(hypergeom_tail(0, 1, 0, 0), 1.0);
}

TEST(HypergeomTail, SmallEnumeration) { EXPECT_NEAR(hypergeom_tail(2, 4, 2, 2), 1.0 / 6.0, 1e-15); }

TEST(HypergeomTail, TwentyChooseFive) {
  EXPECT_NEAR(hypergeom_tail(4, 20, 5, 5), 76.0 / 15504.0, 1e-15);
}

TEST(HypergeomTail, CertainEvent) { EXPECT_NEAR(hypergeom_tail(5, 5, 5, 5), 1.0, 1e-15); }

TEST(HypergeomTail, PerfectAlignment) { EXPECT_NEAR(hypergeom_tail(5, 10, 5, 5), 1.0 / 252.0, 1e-15); }

TEST(HypergeomTail, InvalidCounts) {
  EXPECT_THROW(hypergeom_tail(1, 5, 6, 2), Error);
  EXPECT_THROW(hypergeom_tail(1, 5, 2, 6), Error);
  EXPECT_THROW(hypergeom_tail(-1, 5, 2, 2), Error);
  EXPECT_THROW(hypergeom_tail(4, 10, 3, 5), Error);
}

TEST(HypergeomTail, MatchesEnumerationOnSmallGrid) {
  LogFactorialTable lf(16);
  for (int M = 1; M <= 16; ++M)
    for (int n = 0; n <= M; ++n)
      for (int N = 0; N <= M; ++N)
        for (int x = 0; x <= std::min(n, N); ++x) {
          double tail = 0.0;
          for (int i = x; i <= std::min(n, N); ++i) tail += choose(n, i) * choose(M - n, N - i);
          tail /= choose(M, N);
          ASSERT_NEAR(hypergeom_tail(x, M, n, N, lf), tail, 1e-12) << M << ' ' << n << ' ' << N << ' ' << x;
        }
}

TEST(HypergeomTail, LargePopulationStaysInRange) {
  const double p = hypergeom_tail(300, 26000, 400, 500);
  EXPECT_GE(p, 0.0);
  EXPECT_LT(p, 1e-100);
}

struct Toy {
  Hierarchy h;
  AnnotationMap ann;
  ClusterMatrix clusters;
};

// 10 genes; term a on g00..g04, term b on every gene; k=2 splits 5/5.
Toy toy() {
  Toy t;
  t.h = Hierarchy::from_edges({{"a", "b"}});
  t.ann = testing::term_sets(t.h, {{"a", 5}, {"b", 10}}, 10);
  t.clusters.genes = t.ann.genes().names();
  t.clusters.cluster_counts = {2, 3};
  t.clusters.assignment = {{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, {0, 0, 0, 1, 1, 1, 2, 2, 2, 2}};
  return t;
}

TEST(Enrich, ColumnLayoutTermMajor) {
  auto t = toy();
  const auto m = enrich(t.clusters, t.ann, t.h, {0, 1}, GraphTag::kG);
  ASSERT_EQ(m.cols(), 4u);
  EXPECT_EQ(m.columns[0].id(), "G|a|2");
  EXPECT_EQ(m.columns[1].id(), "G|a|3");
  EXPECT_EQ(m.columns[2].id(), "G|b|2");
  EXPECT_EQ(m.columns[3].id(), "G|b|3");
}

TEST(Enrich, EverythingAnnotatedGivesOne) {
  auto t = toy();
  const auto m = enrich(t.clusters, t.ann, t.h, {1}, GraphTag::kF);
  EXPECT_TRUE((m.values.array() == 1.0).all());
}

TEST(Enrich, AlignedClusterValue) {
  auto t = toy();
  const auto m = enrich(t.clusters, t.ann, t.h, {0}, GraphTag::kG);
  for (int g = 0; g < 5; ++g) EXPECT_NEAR(m.values(g, 0), 1.0 / 252.0, 1e-15);
  for (int g = 5; g < 10; ++g) EXPECT_EQ(m.values(g, 0), 1.0);
}

TEST(Enrich, SameClusterSameValue) {
  auto t = toy();
  const auto m = enrich(t.clusters, t.ann, t.h, {0, 1}, GraphTag::kG);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const auto& labels = t.clusters.assignment[c % 2];
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j)
        if (labels[i] == labels[j])
          EXPECT_EQ(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)),
                    m.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)));
  }
}

TEST(Enrich, GeneListMismatch) {
  auto t = toy();
  t.clusters.genes[0] = "zz";
  EXPECT_THROW(enrich(t.clusters, t.ann, t.h, {0}, GraphTag::kG), Error);
}

TEST(ConcatFeatures, DoublesColumnsAndTagsSecondHalf) {
  auto t = toy();
  const auto g = enrich(t.clusters, t.ann, t.h, {0, 1}, GraphTag::kG);
  const auto f = enrich(t.clusters, t.ann, t.h, {0, 1}, GraphTag::kF);
  const auto both = concat_features(g, f);
  EXPECT_EQ(both.cols(), 2 * g.cols());
  EXPECT_EQ(both.columns[g.cols()].graph, GraphTag::kF);
  EXPECT_EQ(both.columns[g.cols() - 1].graph, GraphTag::kG);
  EXPECT_EQ(both.values.rightCols(static_cast<Eigen::Index>(f.cols())), f.values);
}

TEST(ConcatFeatures, EmptySecondIsIdentity) {
  auto t = toy();
  const auto g = enrich(t.clusters, t.ann, t.h, {0}, GraphTag::kG);
  const auto same = concat_features(g, FeatureMatrix{});
  EXPECT_EQ(same.values, g.values);
  EXPECT_EQ(same.columns, g.columns);
}

TEST(ConcatFeatures, GeneOrderMismatch) {
  auto t = toy();
  const auto g = enrich(t.clusters, t.ann, t.h, {0}, GraphTag::kG);
  auto f = enrich(t.clusters, t.ann, t.h, {0}, GraphTag::kF);
  std::swap(f.genes[0], f.genes[1]);
  try {
    concat_features(g, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeneOrderMismatch);
  }
}

TEST(Features, TextRoundTripAndSliceExact) {
  auto t = toy();
  const auto g = enrich(t.clusters, t.ann, t.h, {0, 1}, GraphTag::kG);
  std::ostringstream out;
  write_features(out, g);
  const auto back = read_features_text(out.str());
  EXPECT_EQ(back.genes, g.genes);
  EXPECT_EQ(back.columns, g.columns);
  EXPECT_EQ(back.values, g.values);
  const auto s = g.slice({1, 7}, {3, 0});
  EXPECT_EQ(s.genes, (std::vector<std::string>{g.genes[1], g.genes[7]}));
  EXPECT_EQ(s.values(1, 0), g.values(7, 3));
  EXPECT_EQ(s.values(0, 1), g.values(1, 0));
}

TEST(Features, DescriptorParse) {
  const auto d = FeatureDescriptor::parse("F|GO:0001|30");
  EXPECT_EQ(d.graph, GraphTag::kF);
  EXPECT_EQ(d.term, "GO:0001");
  EXPECT_EQ(d.cluster_count, 30);
  EXPECT_THROW(FeatureDescriptor::parse("X|a|3"), Error);
}

}  // namespace
}  // namespace gcnhmc
