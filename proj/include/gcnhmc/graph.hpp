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

#ifndef GCNHMC_GRAPH_HPP
#define GCNHMC_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/ingest.hpp"
#include "gcnhmc/ontology.hpp"

namespace gcnhmc {

struct CoexpressionWeights {
  static constexpr double kMin = 1.0;
  static constexpr bool kBounded = false;
};

struct AffinityWeights {
  static constexpr double kMin = 0.0;
  static constexpr bool kBounded = true;  // weights in [0,1]
};

struct Neighbor {
  GeneId node;
  double weight;
};

/// Undirected weighted graph over a lexicographically ordered gene table.
/// `WeightTag` fixes the admissible weight range.
template <typename WeightTag>
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Genes are the edge endpoints plus `extra_genes`.
  static WeightedGraph from_edges(const std::vector<EdgeRecord>& edges,
                                  std::vector<std::string> extra_genes = {}) {
    for (const auto& e : edges) {
      extra_genes.push_back(e.gene_a);
      extra_genes.push_back(e.gene_b);
    }
    WeightedGraph g(SymbolTable::from_names(std::move(extra_genes)));
    for (const auto& e : edges) {
      g.add_edge(*g.genes_.find(e.gene_a), *g.genes_.find(e.gene_b), e.weight);
    }
    g.finish();
    return g;
  }

  const SymbolTable& genes() const { return genes_; }
  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<Neighbor>& neighbors(GeneId v) const { return adjacency_.at(v); }
  double max_weight() const { return max_weight_; }

  std::optional<double> weight(GeneId u, GeneId v) const {
    const auto& row = adjacency_.at(u);
    auto it = std::lower_bound(row.begin(), row.end(), v,
                               [](const Neighbor& n, GeneId id) { return n.node < id; });
    if (it == row.end() || it->node != v) return std::nullopt;
    return it->weight;
  }

  /// Each undirected edge once, with u < v.
  std::vector<EdgeRecord> edges() const {
    std::vector<EdgeRecord> out;
    for (GeneId u = 0; u < node_count(); ++u)
      for (const auto& n : adjacency_[u])
        if (u < n.node) out.push_back({genes_.name(u), genes_.name(n.node), n.weight});
    return out;
  }

  /// Same node table with every edge weight replaced by fn(u, v, w).
  template <typename OtherTag, typename Fn>
  WeightedGraph<OtherTag> reweighted(Fn&& fn) const {
    WeightedGraph<OtherTag> out(genes_);
    for (GeneId u = 0; u < node_count(); ++u)
      for (const auto& n : adjacency_[u])
        if (u < n.node) out.add_edge(u, n.node, fn(u, n.node, n.weight));
    out.finish();
    return out;
  }

  template <typename>
  friend class WeightedGraph;

 private:
  explicit WeightedGraph(SymbolTable genes)
      : genes_(std::move(genes)), adjacency_(genes_.size()) {}

  void add_edge(GeneId u, GeneId v, double w) {
    if (u == v) throw Error(ErrorCode::kSelfLoop, genes_.name(u));
    if (!(w >= WeightTag::kMin) || (WeightTag::kBounded && w > 1.0)) {
      throw Error(WeightTag::kBounded ? ErrorCode::kInvalidValue : ErrorCode::kSubThresholdWeight,
                  "edge weight " + format_double(w) + " out of range");
    }
    adjacency_[u].push_back({v, w});
    adjacency_[v].push_back({u, w});
  }

  void finish() {
    edge_count_ = 0;
    max_weight_ = 0.0;
    for (auto& row : adjacency_) {
      std::sort(row.begin(), row.end(),
                [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
      for (std::size_t i = 1; i < row.size(); ++i)
        if (row[i].node == row[i - 1].node)
          throw Error(ErrorCode::kDuplicateEdge, "duplicate edge in graph");
      edge_count_ += row.size();
      for (const auto& n : row) max_weight_ = std::max(max_weight_, n.weight);
    }
    edge_count_ /= 2;
  }

  SymbolTable genes_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::size_t edge_count_ = 0;
  double max_weight_ = 0.0;
};

using Network = WeightedGraph<CoexpressionWeights>;
using AffinityNetwork = WeightedGraph<AffinityWeights>;

enum class SharedFunctionRatio {
  kJaccard,  // |intersection| / |union|, stays in [0,1]
  kLiteral,  // |union| / |intersection|, unbounded; compatibility only
};

namespace detail {

inline double shared_function_term(const std::vector<TermId>& a, const std::vector<TermId>& b,
                                   SharedFunctionRatio ratio) {
  std::size_t common = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t all = a.size() + b.size() - common;
  if (ratio == SharedFunctionRatio::kJaccard)
    return all == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(all);
  return common == 0 ? 0.0 : static_cast<double>(all) / static_cast<double>(common);
}

inline double normalized_coexpression(double w, double max_w) {
  if (!(max_w > 1.0)) {
    throw Error(ErrorCode::kDegenerateWeights,
                "maximum co-expression weight is 1; normalization is 0/0");
  }
  return (w - 1.0) / (max_w - 1.0);
}

}  // namespace detail

/// Mean of the normalized co-expression weight and the fraction of shared
/// functions of the two genes. `ann` must be indexed by `net`'s gene table.
inline double affinity_weight(GeneId u, GeneId v, const Network& net, const AnnotationMap& ann,
                              SharedFunctionRatio ratio = SharedFunctionRatio::kJaccard) {
  auto w = net.weight(u, v);
  if (!w) {
    throw Error(ErrorCode::kUnknownGene,
                "no edge between " + net.genes().name(u) + " and " + net.genes().name(v));
  }
  return 0.5 * (detail::normalized_coexpression(*w, net.max_weight()) +
                detail::shared_function_term(ann.terms_of(u), ann.terms_of(v), ratio));
}

inline AffinityNetwork build_affinity(const Network& net, const AnnotationMap& ann) {
  if (!(ann.genes() == net.genes()))
    throw Error(ErrorCode::kGeneSetMismatch, "annotations are not indexed by the network genes");
  const double max_w = net.max_weight();
  if (!(max_w > 1.0)) {
    throw Error(ErrorCode::kDegenerateWeights,
                "maximum co-expression weight is 1; normalization is 0/0");
  }
  return net.reweighted<AffinityWeights>([&](GeneId u, GeneId v, double w) {
    return 0.5 * (detail::normalized_coexpression(w, max_w) +
                  detail::shared_function_term(ann.terms_of(u), ann.terms_of(v),
                                               SharedFunctionRatio::kJaccard));
  });
}

/// Induced subgraph on `genes` (names); node order stays lexicographic.
template <typename Tag>
WeightedGraph<Tag> subgraph(const WeightedGraph<Tag>& net, const std::vector<std::string>& genes) {
  std::vector<char> keep(net.node_count(), 0);
  for (const auto& name : genes) {
    auto id = net.genes().find(name);
    if (!id) throw Error(ErrorCode::kUnknownGene, name);
    keep[*id] = 1;
  }
  std::vector<EdgeRecord> edges;
  for (GeneId u = 0; u < net.node_count(); ++u) {
    if (!keep[u]) continue;
    for (const auto& n : net.neighbors(u))
      if (u < n.node && keep[n.node])
        edges.push_back({net.genes().name(u), net.genes().name(n.node), n.weight});
  }
  return WeightedGraph<Tag>::from_edges(edges, genes);
}

/// Connected component label per node (labels in order of first node).
template <typename Tag>
std::vector<int> connected_components(const WeightedGraph<Tag>& net) {
  std::vector<int> label(net.node_count(), -1);
  int next = 0;
  std::vector<GeneId> stack;
  for (GeneId s = 0; s < net.node_count(); ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const GeneId u = stack.back();
      stack.pop_back();
      for (const auto& n : net.neighbors(u))
        if (label[n.node] < 0) {
          label[n.node] = next;
          stack.push_back(n.node);
        }
    }
    ++next;
  }
  return label;
}

template <typename Tag>
void write_graph(std::ostream& out, const WeightedGraph<Tag>& net) {
  write_edges(out, net.edges());
}

}  // namespace gcnhmc

#endif  // GCNHMC_GRAPH_HPP
