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

// Spectral clustering: unnormalized Laplacian, smallest-nonzero eigenvector
// embedding and k-means on the embedded points.

#ifndef GCNHMC_SPECTRAL_HPP
#define GCNHMC_SPECTRAL_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/graph.hpp"

namespace gcnhmc {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// L = D - A over the graph's node order.
template <typename Tag>
SparseMatrix laplacian(const WeightedGraph<Tag>& net) {
  const auto n = static_cast<Eigen::Index>(net.node_count());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * net.edge_count() + net.node_count());
  for (GeneId u = 0; u < net.node_count(); ++u) {
    double degree = 0.0;
    for (const auto& nb : net.neighbors(u)) {
      triplets.emplace_back(u, nb.node, -nb.weight);
      degree += nb.weight;
    }
    triplets.emplace_back(u, u, degree);
  }
  SparseMatrix L(n, n);
  L.setFromTriplets(triplets.begin(), triplets.end());
  L.makeCompressed();
  return L;
}

struct EigenSolverOptions {
  int max_iterations = 1000;
  double tolerance = 1e-10;
  /// Matrices with fewer rows use a dense symmetric solver.
  Eigen::Index dense_below = 500;
  std::uint64_t seed = 0x5eed;
};

struct SpectralEmbedding {
  Eigen::MatrixXd coordinates;  // one row per node, one column per eigenvector
  Eigen::VectorXd eigenvalues;  // ascending
  bool padded = false;          // zero-eigenvalue vectors were needed to reach n
};

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

namespace detail {

inline EigenPairs dense_smallest(const SparseMatrix& L, Eigen::Index count) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(L),
                                                        Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::kEigensolverFailure, "dense symmetric eigensolver failed");
  return {solver.eigenvalues().head(count), solver.eigenvectors().leftCols(count)};
}

/// Lanczos with full reorthogonalization on the complement of `locked`.
/// Returns Ritz pairs of the smallest eigenvalues with their residual norms.
struct LanczosRun {
  Eigen::VectorXd ritz_values;
  Eigen::MatrixXd ritz_vectors;
  Eigen::VectorXd residuals;
};

inline LanczosRun lanczos_deflated(const SparseMatrix& L, const Eigen::MatrixXd& locked,
                                   Eigen::Index steps, std::mt19937_64& rng) {
  const Eigen::Index n = L.rows();
  std::normal_distribution<double> normal;
  auto project = [&](Eigen::VectorXd& v) {
    if (locked.cols() > 0) {
      v -= locked * (locked.transpose() * v);
      v -= locked * (locked.transpose() * v);
    }
  };

  Eigen::MatrixXd Q(n, steps);
  Eigen::VectorXd alpha(steps), beta(steps);
  Eigen::VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = normal(rng);
  project(q);
  q.normalize();

  Eigen::Index m = 0;
  for (; m < steps; ++m) {
    Q.col(m) = q;
    Eigen::VectorXd w = L * q;
    project(w);
    alpha(m) = q.dot(w);
    // Full reorthogonalization, twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
      w -= Q.leftCols(m + 1) * (Q.leftCols(m + 1).transpose() * w);
      project(w);
    }
    beta(m) = w.norm();
    if (beta(m) < 1e-12 * std::max(1.0, std::abs(alpha(m)))) {
      ++m;
      break;  // invariant subspace found
    }
    q = w / beta(m);
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    T(i, i) = alpha(i);
    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(T);
  LanczosRun run;
  run.ritz_values = tri.eigenvalues();
  run.ritz_vectors = Q.leftCols(m) * tri.eigenvectors();
  run.residuals.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd x = run.ritz_vectors.col(i);
    Eigen::VectorXd r = L * x - run.ritz_values(i) * x;
    project(r);
    run.residuals(i) = r.norm();
  }
  return run;
}

/// Smallest `count` eigenpairs by repeated deflated Lanczos: each run locks
/// its converged smallest Ritz pairs, so repeated eigenvalues are recovered
/// by later runs on the deflated operator.
inline EigenPairs lanczos_smallest(const SparseMatrix& L, Eigen::Index count,
                                   const EigenSolverOptions& opt) {
  const Eigen::Index n = L.rows();
  std::mt19937_64 rng(opt.seed);
  Eigen::MatrixXd locked(n, 0);
  std::vector<double> locked_values;
  double scale = 0.0;  // Gershgorin bound on the spectrum
  for (Eigen::Index k = 0; k < L.outerSize(); ++k) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(L, k); it; ++it) row += std::abs(it.value());
    scale = std::max(scale, row);
  }
  const double tol = opt.tolerance * std::max(1.0, scale);

  int iterations = 0;
  Eigen::Index steps = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * count + 20, 60));
  for (;;) {
    if (++iterations > opt.max_iterations)
      throw Error(ErrorCode::kEigensolverFailure, "Lanczos did not converge");
    const Eigen::Index free_dims = n - locked.cols();
    if (free_dims <= 0) break;
    auto run = lanczos_deflated(L, locked, std::min(steps, free_dims), rng);
    const bool exact = run.ritz_values.size() == free_dims;
    Eigen::Index converged = 0;
    while (converged < run.ritz_values.size() && (exact || run.residuals(converged) <= tol))
      ++converged;
    if (converged == 0) {
      steps = std::min(n, steps * 2);
      continue;
    }
    const auto have = static_cast<Eigen::Index>(locked_values.size());
    if (have >= count) {
      // Ritz values bound the deflated spectrum from above, so a converged
      // smallest value at or above every locked one proves nothing was missed.
      const double largest = *std::max_element(locked_values.begin(), locked_values.end());
      if (run.ritz_values(0) >= largest - tol) break;
    }
    const Eigen::Index take = have >= count ? 1 : std::min(converged, count - have);
    const Eigen::Index old = locked.cols();
    locked.conservativeResize(n, old + take);
    for (Eigen::Index i = 0; i < take; ++i) {
      Eigen::VectorXd v = run.ritz_vectors.col(i);
      if (old + i > 0) v -= locked.leftCols(old + i) * (locked.leftCols(old + i).transpose() * v);
      locked.col(old + i) = v.normalized();
      locked_values.push_back(run.ritz_values(i));
    }
  }

  std::vector<Eigen::Index> order(locked_values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return locked_values[static_cast<std::size_t>(a)] < locked_values[static_cast<std::size_t>(b)];
  });
  EigenPairs out;
  out.values.resize(count);
  out.vectors.resize(n, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    out.values(i) = locked_values[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    out.vectors.col(i) = locked.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

/// Flips each eigenvector so its largest-magnitude entry is positive.
inline void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0) vectors.col(c) *= -1.0;
  }
}

}  // namespace detail

/// The `count` smallest eigenpairs of a symmetric positive semidefinite L.
inline EigenPairs smallest_eigenpairs(const SparseMatrix& L, Eigen::Index count,
                                      const EigenSolverOptions& opt = {}) {
  count = std::min(count, L.rows());
  EigenPairs pairs = L.rows() < opt.dense_below ? detail::dense_smallest(L, count)
                                                : detail::lanczos_smallest(L, count, opt);
  detail::canonicalize_signs(pairs.vectors);
  return pairs;
}

/// Eigenvalues at or below this are treated as zero.
inline double zero_eigenvalue_threshold(double largest) {
  return 1e-9 * std::max(largest, 1.0);
}

/// Embedding from the eigenvectors of the n smallest nonzero eigenvalues.
/// When fewer than n nonzero eigenvalues exist, zero-eigenvalue vectors pad
/// the result (smallest first) and `padded` is set.
/// `zero_multiplicity` is the number of connected components, if known.
inline SpectralEmbedding embed(const SparseMatrix& L, int n, const EigenSolverOptions& opt = {},
                               int zero_multiplicity = -1) {
  const Eigen::Index nodes = L.rows();
  if (n < 1 || n >= nodes) {
    throw Error(ErrorCode::kInvalidValue, "embedding dimension " + std::to_string(n) +
                                              " must lie in [1, " + std::to_string(nodes) + ")");
  }
  if (zero_multiplicity < 0) {
    // Count components from the sparsity pattern.
    std::vector<int> label(static_cast<std::size_t>(nodes), -1);
    zero_multiplicity = 0;
    std::vector<Eigen::Index> stack;
    for (Eigen::Index s = 0; s < nodes; ++s) {
      if (label[static_cast<std::size_t>(s)] >= 0) continue;
      label[static_cast<std::size_t>(s)] = zero_multiplicity;
      stack.push_back(s);
      while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (SparseMatrix::InnerIterator it(L, u); it; ++it)
          if (it.value() != 0.0 && label[static_cast<std::size_t>(it.row())] < 0) {
            label[static_cast<std::size_t>(it.row())] = zero_multiplicity;
            stack.push_back(it.row());
          }
      }
      ++zero_multiplicity;
    }
  }
  const Eigen::Index wanted = std::min<Eigen::Index>(nodes, zero_multiplicity + n);
  EigenPairs pairs = smallest_eigenpairs(L, wanted, opt);

  const double threshold = zero_eigenvalue_threshold(pairs.values.maxCoeff());
  std::vector<Eigen::Index> nonzero, zero;
  for (Eigen::Index i = 0; i < pairs.values.size(); ++i)
    (pairs.values(i) <= threshold ? zero : nonzero).push_back(i);

  std::vector<Eigen::Index> chosen;
  for (auto i : nonzero)
    if (static_cast<int>(chosen.size()) < n) chosen.push_back(i);
  SpectralEmbedding out;
  for (auto i : zero) {
    if (static_cast<int>(chosen.size()) >= n) break;
    chosen.push_back(i);
    out.padded = true;
  }
  out.coordinates.resize(nodes, n);
  out.eigenvalues.resize(n);
  for (int c = 0; c < n; ++c) {
    out.coordinates.col(c) = pairs.vectors.col(chosen[static_cast<std::size_t>(c)]);
    out.eigenvalues(c) = pairs.values(chosen[static_cast<std::size_t>(c)]);
  }
  return out;
}

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
};

struct KMeansResult {
  std::vector<int> labels;  // dense in [0, #nonempty clusters)
  double inertia = 0.0;
};

namespace detail {

inline double squared_distance(const Eigen::MatrixXd& points, Eigen::Index row,
                               const Eigen::MatrixXd& centers, Eigen::Index c) {
  return (points.row(row) - centers.row(c)).squaredNorm();
}

/// Relabels clusters densely in order of first appearance.
inline std::vector<int> dense_labels(const std::vector<int>& labels) {
  std::map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

inline KMeansResult lloyd(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng,
                          int max_iterations) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());
  // k-means++ seeding.
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = points.row(first(rng));
  std::vector<double> closest(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) closest[static_cast<std::size_t>(i)] = squared_distance(points, i, centers, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : closest) total += d;
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= closest[static_cast<std::size_t>(i)];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      closest[static_cast<std::size_t>(i)] =
          std::min(closest[static_cast<std::size_t>(i)], squared_distance(points, i, centers, c));
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(points, i, centers, 0);
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(points, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
  }
  KMeansResult out;
  for (Eigen::Index i = 0; i < n; ++i)
    out.inertia += squared_distance(points, i, centers, labels[static_cast<std::size_t>(i)]);
  out.labels = dense_labels(labels);
  return out;
}

}  // namespace detail

/// k-means++ seeded Lloyd iterations; the restart with the lowest inertia
/// wins. Deterministic for a fixed seed.
inline KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                           const KMeansOptions& opt = {}) {
  if (k < 1 || k > points.rows()) {
    throw Error(ErrorCode::kInvalidValue, "k = " + std::to_string(k) + " with " +
                                              std::to_string(points.rows()) + " points");
  }
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opt.restarts; ++r) {
    auto result = detail::lloyd(points, k, rng, opt.max_iterations);
    if (result.inertia < best.inertia) best = std::move(result);
  }
  return best;
}

enum class GraphTag { kG, kF };

inline char tag_char(GraphTag tag) { return tag == GraphTag::kG ? 'G' : 'F'; }

inline GraphTag parse_graph_tag(std::string_view text) {
  if (text == "G") return GraphTag::kG;
  if (text == "F") return GraphTag::kF;
  throw Error(ErrorCode::kMalformedLine, "graph tag must be G or F, got '" + std::string(text) + "'");
}

/// Cluster labels per gene, one column per cluster count in K.
struct ClusterMatrix {
  std::vector<std::string> genes;
  std::vector<int> cluster_counts;
  std::vector<std::vector<int>> assignment;  // [column][gene]

  int label(std::size_t gene, std::size_t column) const { return assignment.at(column).at(gene); }
};

/// Spectral clustering of `net` for every k in `cluster_counts`: k-means on
/// the eigenvectors of the k smallest eigenvalues of L, zero eigenvalues
/// included. On a connected graph this is the constant vector plus the k-1
/// smallest nonzero ones; on a disconnected graph the zero eigenvectors are
/// component indicators. One eigendecomposition at max(K) serves every k.
template <typename Tag>
ClusterMatrix cluster_sweep(const WeightedGraph<Tag>& net, const std::vector<int>& cluster_counts,
                            std::uint64_t seed, GraphTag tag,
                            const EigenSolverOptions& eig = {}, const KMeansOptions& km = {}) {
  if (cluster_counts.empty()) throw Error(ErrorCode::kInvalidValue, "empty cluster count list");
  const int largest = *std::max_element(cluster_counts.begin(), cluster_counts.end());
  if (largest >= static_cast<int>(net.node_count())) {
    throw Error(ErrorCode::kInvalidValue, "cluster count " + std::to_string(largest) +
                                              " must be below the gene count " +
                                              std::to_string(net.node_count()));
  }
  if (*std::min_element(cluster_counts.begin(), cluster_counts.end()) < 1)
    throw Error(ErrorCode::kInvalidValue, "cluster counts must be positive");
  EigenSolverOptions options = eig;
  options.seed = derive_seed(seed, {tag_of("eigen"), static_cast<std::uint64_t>(tag_char(tag))});
  const auto pairs = smallest_eigenpairs(laplacian(net), largest, options);

  ClusterMatrix out;
  out.genes = net.genes().names();
  out.cluster_counts = cluster_counts;
  out.assignment.resize(cluster_counts.size());
  parallel_for(cluster_counts.size(), [&](std::size_t i) {
    const int k = cluster_counts[i];
    const Eigen::MatrixXd points = pairs.vectors.leftCols(k);
    const auto stream = derive_seed(
        seed, {static_cast<std::uint64_t>(tag_char(tag)), static_cast<std::uint64_t>(k)});
    out.assignment[i] = kmeans(points, k, stream, km).labels;
  });
  return out;
}

/// Adjusted Rand index between two labelings of the same items.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidValue, "label vectors differ in length");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto pairs = [](double x) { return x * (x - 1) / 2; };
  double index = 0, sum_rows = 0, sum_cols = 0;
  for (auto& [_, v] : joint) index += pairs(v);
  for (auto& [_, v] : rows) sum_rows += pairs(v);
  for (auto& [_, v] : cols) sum_cols += pairs(v);
  const double total = pairs(static_cast<double>(a.size()));
  const double expected = total > 0 ? sum_rows * sum_cols / total : 0.0;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

inline void write_cluster_dump(std::ostream& out, const ClusterMatrix& clusters, GraphTag tag) {
  for (std::size_t c = 0; c < clusters.cluster_counts.size(); ++c)
    for (std::size_t g = 0; g < clusters.genes.size(); ++g)
      out << clusters.genes[g] << '\t' << tag_char(tag) << '\t' << clusters.cluster_counts[c]
          << '\t' << clusters.assignment[c][g] << '\n';
}

}  // namespace gcnhmc

#endif  // GCNHMC_SPECTRAL_HPP
