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

// Exhaustive Shapley values for tree ensembles, using the cover-weighted
// conditional expectation: features outside S are marginalized by
// following both children weighted by training cover.

#ifndef GCNHMC_TESTS_SHAP_ORACLE_HPP
#define GCNHMC_TESTS_SHAP_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "gcnhmc/learn.hpp"

namespace gcnhmc::testing {

inline double conditional_value(const DecisionTree& tree, std::size_t node, const std::vector<double>& x,
                                std::uint32_t known, std::size_t label) {
  const auto& n = tree.nodes[node];
  if (n.is_leaf()) return tree.value(node)[label];
  const auto left = static_cast<std::size_t>(n.left), right = static_cast<std::size_t>(n.right);
  if (known >> n.feature & 1u)
    return conditional_value(tree, x[static_cast<std::size_t>(n.feature)] <= n.threshold ? left : right, x, known,
                             label);
  return (tree.nodes[left].cover * conditional_value(tree, left, x, known, label) +
          tree.nodes[right].cover * conditional_value(tree, right, x, known, label)) /
         n.cover;
}

inline double forest_value(const Forest& f, const std::vector<double>& x, std::uint32_t known, std::size_t label) {
  double s = 0.0;
  for (const auto& t : f.trees) s += conditional_value(t, 0, x, known, label);
  return s / static_cast<double>(f.trees.size());
}

/// phi[feature][label] by enumerating all 2^M coalitions.
inline std::vector<std::vector<double>> brute_force_shap(const Forest& f, const std::vector<double>& x) {
  const auto m = static_cast<int>(f.n_features);
  std::vector<double> factorial(static_cast<std::size_t>(m + 1), 1.0);
  for (int i = 1; i <= m; ++i) factorial[static_cast<std::size_t>(i)] = factorial[static_cast<std::size_t>(i - 1)] * i;
  std::vector<std::vector<double>> phi(static_cast<std::size_t>(m), std::vector<double>(f.n_labels(), 0.0));
  for (std::size_t l = 0; l < f.n_labels(); ++l) {
    std::vector<double> v(std::size_t{1} << m);
    for (std::uint32_t s = 0; s < v.size(); ++s) v[s] = forest_value(f, x, s, l);
    for (int i = 0; i < m; ++i)
      for (std::uint32_t s = 0; s < v.size(); ++s) {
        if (s >> i & 1u) continue;
        const int size = __builtin_popcount(s);
        const double w = factorial[static_cast<std::size_t>(size)] *
                         factorial[static_cast<std::size_t>(m - size - 1)] / factorial[static_cast<std::size_t>(m)];
        phi[static_cast<std::size_t>(i)][l] += w * (v[s | (1u << i)] - v[s]);
      }
  }
  return phi;
}

}  // namespace gcnhmc::testing

#endif  // GCNHMC_TESTS_SHAP_ORACLE_HPP
