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
#include <random>

#include "fixtures.hpp"

namespace gcnhmc {
namespace {

Network path3() { return Network::from_edges({{"n1", "n2", 1}, {"n2", "n3", 1}}); }

Network triangles() {
  return Network::from_edges({{"a1", "a2", 1}, {"a2", "a3", 1}, {"a1", "a3", 1},
                              {"b1", "b2", 1}, {"b2", "b3", 1}, {"b1", "b3", 1}});
}

Network ring(int n, double chord) {
  std::vector<EdgeRecord> edges;
  for (int i = 0; i < n; ++i) {
    edges.push_back({"v" + std::to_string(i), "v" + std::to_string((i + 1) % n), 1.0 + (i % 7)});
    if (i % 3 == 0) edges.push_back({"v" + std::to_string(i), "v" + std::to_string((i + n / 2 + 1) % n), chord});
  }
  return Network::from_edges(edges);
}

TEST(Laplacian, PathGraph) {
  const Eigen::MatrixXd L(laplacian(path3()));
  Eigen::Matrix3d expected;
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  EXPECT_EQ(L, Eigen::MatrixXd(expected));
}

TEST(Laplacian, SingleNode) {
  const Eigen::MatrixXd L(laplacian(Network::from_edges({}, {"only"})));
  EXPECT_EQ(L.rows(), 1);
  EXPECT_EQ(L(0, 0), 0.0);
}

TEST(Laplacian, PathSpectrum) {
  const auto pairs = smallest_eigenpairs(laplacian(path3()), 3);
  EXPECT_NEAR(pairs.values(0), 0.0, 1e-12);
  EXPECT_NEAR(pairs.values(1), 1.0, 1e-12);
  EXPECT_NEAR(pairs.values(2), 3.0, 1e-12);
}

TEST(Embed, TwoComponentsExcludeBothZeros) {
  const auto e = embed(laplacian(triangles()), 2);
  EXPECT_FALSE(e.padded);
  EXPECT_NEAR(e.eigenvalues(0), 3.0, 1e-10);
  EXPECT_NEAR(e.eigenvalues(1), 3.0, 1e-10);
}

TEST(Embed, CompleteGraph) {
  const auto k3 = Network::from_edges({{"a", "b", 1}, {"b", "c", 1}, {"a", "c", 1}});
  const auto e = embed(laplacian(k3), 2);
  EXPECT_EQ(e.coordinates.rows(), 3);
  EXPECT_EQ(e.coordinates.cols(), 2);
  EXPECT_NEAR(e.eigenvalues(0), 3.0, 1e-10);
  EXPECT_NEAR(e.eigenvalues(1), 3.0, 1e-10);
}

TEST(Embed, PathFiedlerVector) {
  const auto e = embed(laplacian(path3()), 1);
  EXPECT_NEAR(e.eigenvalues(0), 1.0, 1e-12);
  const double s = 1.0 / std::sqrt(2.0);
  const double sign = e.coordinates(0, 0) > 0 ? 1.0 : -1.0;
  EXPECT_NEAR(sign * e.coordinates(0, 0), s, 1e-12);
  EXPECT_NEAR(e.coordinates(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(sign * e.coordinates(2, 0), -s, 1e-12);
}

TEST(Laplacian, RowSumsZeroAndSemidefinite) {
  std::mt19937_64 rng(3);
  const auto L = laplacian(ring(50, 3));
  const Eigen::MatrixXd dense(L);
  EXPECT_LT(dense.rowwise().sum().cwiseAbs().maxCoeff(), 1e-9);
  std::normal_distribution<double> d;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x(50);
    for (auto& v : x) v = d(rng);
    EXPECT_GE(x.dot(L * x), -1e-9);
  }
}

TEST(Embed, ZeroMultiplicityEqualsComponents) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int parts = 1 + static_cast<int>(rng() % 4);
    std::vector<EdgeRecord> edges;
    for (int p = 0; p < parts; ++p)
      for (int i = 0; i < 5; ++i)
        edges.push_back({"p" + std::to_string(p) + "_" + std::to_string(i),
                         "p" + std::to_string(p) + "_" + std::to_string(i + 1), 1.0 + static_cast<double>(rng() % 4)});
    const auto L = laplacian(Network::from_edges(edges));
    const auto pairs = smallest_eigenpairs(L, L.rows());
    const double tol = zero_eigenvalue_threshold(pairs.values.maxCoeff());
    EXPECT_EQ((pairs.values.array() <= tol).count(), parts);
  }
}

TEST(Embed, DimensionOutOfRange) {
  EXPECT_THROW(embed(laplacian(path3()), 3), Error);
  EXPECT_THROW(embed(laplacian(path3()), 0), Error);
}

TEST(Embed, PadsWithZeroVectorsWhenNeeded) {
  // 4 isolated pairs: 4 zero eigenvalues, 4 nonzero (= 2 each).
  const auto net = Network::from_edges({{"a", "b", 1}, {"c", "d", 1}, {"e", "f", 1}, {"g", "h", 1}});
  const auto e = embed(laplacian(net), 6);
  EXPECT_TRUE(e.padded);
  EXPECT_NEAR(e.eigenvalues(3), 2.0, 1e-10);
  EXPECT_NEAR(e.eigenvalues(4), 0.0, 1e-10);
}

TEST(Eigensolver, LanczosMatchesDense) {
  const auto L = laplacian(ring(120, 2.5));
  EigenSolverOptions sparse;
  sparse.dense_below = 0;
  const auto a = smallest_eigenpairs(L, 8);
  const auto b = smallest_eigenpairs(L, 8, sparse);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(a.values(i), b.values(i), 1e-8);
  // Eigenvectors of simple eigenvalues agree after sign canonicalization.
  for (int i = 1; i < 8; ++i) {
    if (std::abs(a.values(i) - a.values(i - 1)) < 1e-6 || (i + 1 < 8 && std::abs(a.values(i + 1) - a.values(i)) < 1e-6))
      continue;
    EXPECT_NEAR(std::abs(a.vectors.col(i).dot(b.vectors.col(i))), 1.0, 1e-6);
  }
}

TEST(Eigensolver, LanczosHandlesDisconnectedGraphs) {
  std::vector<EdgeRecord> edges;
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 30; ++i)
      edges.push_back({"c" + std::to_string(c) + "_" + std::to_string(i),
                       "c" + std::to_string(c) + "_" + std::to_string((i + 1) % 30), 1.0 + (i % 3)});
  const auto L = laplacian(Network::from_edges(edges));
  EigenSolverOptions sparse;
  sparse.dense_below = 0;
  const auto a = smallest_eigenpairs(L, 6);
  const auto b = smallest_eigenpairs(L, 6, sparse);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(a.values(i), b.values(i), 1e-8);
}

TEST(KMeans, SeparatedBlobs) {
  Eigen::MatrixXd p(8, 2);
  p << 0, 0, 0.1, 0, 0, 0.1, 0.1, 0.1, 10, 10, 10.1, 10, 10, 10.1, 10.1, 10.1;
  EXPECT_EQ(kmeans(p, 2, 3).labels, (std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));
}

TEST(KMeans, OneClusterPerPoint) {
  Eigen::MatrixXd p(4, 1);
  p << 0, 1, 2, 5;
  const auto r = kmeans(p, 4, 9);
  EXPECT_EQ(r.inertia, 0.0);
  EXPECT_EQ(r.labels, (std::vector<int>{0, 1, 2, 3}));
}

TEST(KMeans, SameSeedSameLabels) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  Eigen::MatrixXd p(60, 3);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = d(rng);
  EXPECT_EQ(kmeans(p, 5, 77).labels, kmeans(p, 5, 77).labels);
}

TEST(ClusterSweep, DisjointTrianglesSplit) {
  const auto c = cluster_sweep(triangles(), {2}, 1, GraphTag::kG);
  ASSERT_EQ(c.assignment.size(), 1u);
  EXPECT_EQ(c.assignment[0], (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(ClusterSweep, BridgedTrianglesSplit) {
  const auto net = Network::from_edges({{"a1", "a2", 5}, {"a2", "a3", 5}, {"a1", "a3", 5},
                                        {"b1", "b2", 5}, {"b2", "b3", 5}, {"b1", "b3", 5}, {"a3", "b1", 1}});
  const auto c = cluster_sweep(net, {2}, 1, GraphTag::kG);
  ASSERT_EQ(c.assignment.size(), 1u);
  EXPECT_EQ(c.assignment[0], (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(ClusterSweep, ReproducibleAndDense) {
  SynthSpec spec;
  spec.n_genes = 90;
  spec.n_blocks = 4;
  const auto net = Network::from_edges(generate(spec).edges);
  const auto a = cluster_sweep(net, {3, 6, 9}, 8, GraphTag::kG);
  EXPECT_EQ(a.assignment, cluster_sweep(net, {3, 6, 9}, 8, GraphTag::kG).assignment);
  for (std::size_t i = 0; i < a.assignment.size(); ++i) {
    const auto& labels = a.assignment[i];
    int next = 0;
    for (int l : labels) {
      ASSERT_LE(l, next);
      if (l == next) ++next;
    }
    EXPECT_LE(next, a.cluster_counts[i]);
  }
}

TEST(ClusterSweep, PlantedBlocksRecovered) {
  SynthSpec spec;
  spec.n_genes = 60;
  spec.n_blocks = 3;
  spec.seed = 4;
  const auto d = generate(spec);
  const auto c = cluster_sweep(Network::from_edges(d.edges), {3}, 2, GraphTag::kG);
  EXPECT_DOUBLE_EQ(adjusted_rand_index(c.assignment[0], d.block_of), 1.0);
}

TEST(ClusterSweep, OneColumnPerClusterCount) {
  const auto c = cluster_sweep(ring(30, 2), {2, 3}, 1, GraphTag::kF);
  EXPECT_EQ(c.assignment.size(), 2u);
  EXPECT_EQ(c.cluster_counts, (std::vector<int>{2, 3}));
}

TEST(ClusterSweep, CountMustBeBelowGeneCount) {
  EXPECT_THROW(cluster_sweep(path3(), {3}, 1, GraphTag::kG), Error);
}

TEST(AdjustedRand, KnownValues) {
  EXPECT_DOUBLE_EQ(adjusted_rand_index({0, 0, 1, 1}, {1, 1, 0, 0}), 1.0);
  // Classic example: ARI of {0,0,0,1,1,1} vs {0,0,1,1,2,2} is 0.2424...
  EXPECT_NEAR(adjusted_rand_index({0, 0, 0, 1, 1, 1}, {0, 0, 1, 1, 2, 2}), 0.24242424242424243, 1e-12);
}

}  // namespace
}  // namespace gcnhmc
