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

// Function hierarchy (a rooted DAG of terms), gene annotations and the
// per-root sub-hierarchy trees used for classification.

#ifndef GCNHMC_ONTOLOGY_HPP
#define GCNHMC_ONTOLOGY_HPP

#include <algorithm>
#include <cstddef>
#include <deque>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/ingest.hpp"

namespace gcnhmc {

class Hierarchy {
 public:
  Hierarchy() = default;

  /// Terms are the edge endpoints plus `extra_terms` (isolated roots).
  static Hierarchy from_edges(const std::vector<HierarchyEdgeRecord>& edges,
                              std::vector<std::string> extra_terms = {}) {
    check_acyclic(edges);
    for (const auto& e : edges) {
      extra_terms.push_back(e.child);
      extra_terms.push_back(e.parent);
    }
    Hierarchy h;
    h.terms_ = SymbolTable::from_names(std::move(extra_terms));
    h.parents_.assign(h.terms_.size(), {});
    h.children_.assign(h.terms_.size(), {});
    for (const auto& e : edges) {
      const TermId c = *h.terms_.find(e.child);
      const TermId p = *h.terms_.find(e.parent);
      h.parents_[c].push_back(p);
      h.children_[p].push_back(c);
    }
    h.finish();
    return h;
  }

  const SymbolTable& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<TermId>& parents(TermId t) const { return parents_.at(t); }
  const std::vector<TermId>& children(TermId t) const { return children_.at(t); }
  const std::vector<TermId>& roots() const { return roots_; }
  /// Every term appears after all of its parents.
  const std::vector<TermId>& topological_order() const { return topo_; }

  std::vector<HierarchyEdgeRecord> edges() const {
    std::vector<HierarchyEdgeRecord> out;
    for (TermId c = 0; c < size(); ++c)
      for (TermId p : parents_[c]) out.push_back({terms_.name(c), terms_.name(p)});
    return out;
  }

  /// Strict ancestors of every term, sorted.
  std::vector<std::vector<TermId>> ancestor_sets() const {
    std::vector<std::vector<TermId>> anc(size());
    for (TermId t : topo_) {
      auto& a = anc[t];
      for (TermId p : parents_[t]) {
        a.push_back(p);
        a.insert(a.end(), anc[p].begin(), anc[p].end());
      }
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return anc;
  }

  /// `root` and every term below it, in topological order.
  std::vector<TermId> descendants(TermId root) const {
    std::vector<char> mark(size(), 0);
    mark[root] = 1;
    std::vector<TermId> out;
    for (TermId t : topo_) {
      if (!mark[t]) {
        for (TermId p : parents_[t])
          if (mark[p]) {
            mark[t] = 1;
            break;
          }
      }
      if (mark[t]) out.push_back(t);
    }
    return out;
  }

  /// Sub-hierarchy induced by the terms flagged in `keep`.
  Hierarchy restrict(const std::vector<char>& keep) const {
    std::vector<HierarchyEdgeRecord> kept_edges;
    std::vector<std::string> kept_terms;
    for (TermId t = 0; t < size(); ++t) {
      if (!keep[t]) continue;
      kept_terms.push_back(terms_.name(t));
      for (TermId p : parents_[t])
        if (keep[p]) kept_edges.push_back({terms_.name(t), terms_.name(p)});
    }
    return from_edges(kept_edges, std::move(kept_terms));
  }

 private:
  void finish() {
    roots_.clear();
    for (TermId t = 0; t < size(); ++t) {
      std::sort(parents_[t].begin(), parents_[t].end());
      std::sort(children_[t].begin(), children_[t].end());
      if (parents_[t].empty()) roots_.push_back(t);
    }
    // Kahn's algorithm, smallest id first for a canonical order.
    std::vector<std::size_t> pending(size());
    std::vector<TermId> ready;
    for (TermId t = 0; t < size(); ++t) {
      pending[t] = parents_[t].size();
      if (pending[t] == 0) ready.push_back(t);
    }
    topo_.clear();
    std::size_t head = 0;
    while (head < ready.size()) {
      const TermId t = ready[head++];
      topo_.push_back(t);
      for (TermId c : children_[t])
        if (--pending[c] == 0) ready.push_back(c);
    }
  }

  SymbolTable terms_;
  std::vector<std::vector<TermId>> parents_;
  std::vector<std::vector<TermId>> children_;
  std::vector<TermId> roots_;
  std::vector<TermId> topo_;
};

/// phi and its inverse over a fixed gene table and a hierarchy's term ids.
class AnnotationMap {
 public:
  AnnotationMap() = default;
  AnnotationMap(SymbolTable genes, std::size_t n_terms)
      : genes_(std::move(genes)), by_gene_(genes_.size()), by_term_(n_terms) {}

  /// Pairs may repeat; they are deduplicated.
  static AnnotationMap from_pairs(SymbolTable genes, std::size_t n_terms,
                                  const std::vector<std::pair<GeneId, TermId>>& pairs) {
    AnnotationMap m(std::move(genes), n_terms);
    for (auto [g, t] : pairs) {
      m.by_gene_.at(g).push_back(t);
      m.by_term_.at(t).push_back(g);
    }
    m.normalize();
    return m;
  }

  /// Resolves records against `genes` and `h`. Rows whose gene is absent from
  /// `genes` are skipped (counted in `dropped`); unknown terms are an error.
  static AnnotationMap from_records(const std::vector<AnnotationRecord>& records,
                                    const SymbolTable& genes, const Hierarchy& h,
                                    std::size_t* dropped = nullptr) {
    std::vector<std::pair<GeneId, TermId>> pairs;
    std::size_t skipped = 0;
    for (const auto& r : records) {
      auto t = h.terms().find(r.term);
      if (!t) throw Error(ErrorCode::kUnknownTerm, r.term + " is not in the hierarchy");
      auto g = genes.find(r.gene);
      if (!g) {
        ++skipped;
        continue;
      }
      pairs.emplace_back(*g, *t);
    }
    if (dropped) *dropped = skipped;
    return from_pairs(genes, h.size(), pairs);
  }

  const SymbolTable& genes() const { return genes_; }
  std::size_t n_genes() const { return by_gene_.size(); }
  std::size_t n_terms() const { return by_term_.size(); }
  const std::vector<TermId>& terms_of(GeneId g) const { return by_gene_.at(g); }
  const std::vector<GeneId>& genes_of(TermId t) const { return by_term_.at(t); }
  bool has(GeneId g, TermId t) const {
    const auto& v = by_gene_.at(g);
    return std::binary_search(v.begin(), v.end(), t);
  }
  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& v : by_gene_) n += v.size();
    return n;
  }

  std::vector<std::pair<GeneId, TermId>> pairs() const {
    std::vector<std::pair<GeneId, TermId>> out;
    for (GeneId g = 0; g < by_gene_.size(); ++g)
      for (TermId t : by_gene_[g]) out.emplace_back(g, t);
    return out;
  }

  friend bool operator==(const AnnotationMap& a, const AnnotationMap& b) {
    return a.genes_ == b.genes_ && a.by_gene_ == b.by_gene_ && a.by_term_ == b.by_term_;
  }

 private:
  void normalize() {
    for (auto* side : {&by_gene_, &by_term_})
      for (auto& v : *side) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
      }
  }

  SymbolTable genes_;
  std::vector<std::vector<TermId>> by_gene_;
  std::vector<std::vector<GeneId>> by_term_;
};

/// Adds every ancestor of every annotated term (true-path rule).
inline AnnotationMap true_path_close(const AnnotationMap& raw, const Hierarchy& h) {
  if (raw.n_terms() != h.size())
    throw Error(ErrorCode::kUnknownTerm, "annotation term space does not match hierarchy");
  const auto anc = h.ancestor_sets();
  std::vector<std::pair<GeneId, TermId>> pairs;
  for (GeneId g = 0; g < raw.n_genes(); ++g) {
    for (TermId t : raw.terms_of(g)) {
      pairs.emplace_back(g, t);
      for (TermId a : anc[t]) pairs.emplace_back(g, a);
    }
  }
  return AnnotationMap::from_pairs(raw.genes(), h.size(), pairs);
}

inline bool is_closed(const AnnotationMap& ann, const Hierarchy& h) {
  for (GeneId g = 0; g < ann.n_genes(); ++g)
    for (TermId t : ann.terms_of(g))
      for (TermId p : h.parents(t))
        if (!ann.has(g, p)) return false;
  return true;
}

/// Throws ClosureViolation naming the first gene/edge that breaks closure.
inline void require_closed(const AnnotationMap& ann, const Hierarchy& h) {
  for (GeneId g = 0; g < ann.n_genes(); ++g)
    for (TermId t : ann.terms_of(g))
      for (TermId p : h.parents(t))
        if (!ann.has(g, p)) {
          throw Error(ErrorCode::kClosureViolation,
                      ann.genes().name(g) + " has " + h.terms().name(t) + " but not its parent " +
                          h.terms().name(p));
        }
}

/// Keeps the terms annotated to strictly more than `min_genes` genes.
inline std::pair<Hierarchy, AnnotationMap> filter_functions(const AnnotationMap& ann,
                                                            const Hierarchy& h,
                                                            std::size_t min_genes) {
  require_closed(ann, h);
  std::vector<char> keep(h.size(), 0);
  for (TermId t = 0; t < h.size(); ++t) keep[t] = ann.genes_of(t).size() > min_genes;
  Hierarchy filtered = h.restrict(keep);
  std::vector<std::pair<GeneId, TermId>> pairs;
  for (auto [g, t] : ann.pairs())
    if (keep[t]) pairs.emplace_back(g, *filtered.terms().find(h.terms().name(t)));
  return {std::move(filtered),
          AnnotationMap::from_pairs(ann.genes(), filtered.size(), pairs)};
}

/// A tree-shaped sub-hierarchy. Local indices follow breadth-first order, so
/// index 0 is the root and every parent precedes its children.
struct SubHierarchy {
  TermId root = 0;
  std::vector<TermId> terms;
  std::vector<std::string> names;
  std::vector<int> parent;  // local index, -1 for the root
  std::vector<int> level;
  std::vector<GeneId> genes;  // genes annotated with the root

  std::size_t size() const { return terms.size(); }
  const std::string& root_name() const { return names.front(); }

  int depth() const {
    int d = 0;
    for (int l : level) d = std::max(d, l);
    return d;
  }

  int local_index(TermId t) const {
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (terms[i] == t) return static_cast<int>(i);
    return -1;
  }

  std::vector<int> children(int local) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < parent.size(); ++i)
      if (parent[i] == local) out.push_back(static_cast<int>(i));
    return out;
  }

  std::vector<std::pair<TermId, TermId>> tree_edges() const {
    std::vector<std::pair<TermId, TermId>> out;
    for (std::size_t i = 1; i < terms.size(); ++i) out.emplace_back(terms[i], terms[parent[i]]);
    return out;
  }

  /// Number of non-root terms at each depth 1..depth().
  std::vector<int> functions_per_level() const {
    std::vector<int> counts(static_cast<std::size_t>(depth()), 0);
    for (std::size_t i = 1; i < level.size(); ++i) ++counts[static_cast<std::size_t>(level[i] - 1)];
    return counts;
  }

  std::string functions_per_level_string() const {
    std::string out;
    for (int c : functions_per_level()) out += (out.empty() ? "" : "/") + std::to_string(c);
    return out;
  }
};

/// Depth of each local term (root = 0). Requires parents before children.
inline std::vector<int> levels(const SubHierarchy& sh) {
  std::vector<int> depth(sh.size(), 0);
  for (std::size_t i = 1; i < sh.size(); ++i) depth[i] = depth[static_cast<std::size_t>(sh.parent[i])] + 1;
  return depth;
}

/// Reduces the DAG below `root` to a tree. A term with several parents keeps
/// the parent b maximizing |genes(term)| / |genes(b)|; ties go to the
/// lexicographically smallest parent id.
inline SubHierarchy dag_to_tree(const Hierarchy& h, TermId root, const AnnotationMap& ann) {
  const auto members = h.descendants(root);
  std::vector<char> inside(h.size(), 0);
  for (TermId t : members) inside[t] = 1;

  std::vector<long> chosen(h.size(), -1);
  for (TermId t : members) {
    if (t == root) continue;
    const double own = static_cast<double>(ann.genes_of(t).size());
    long best = -1;
    double best_weight = -1.0;
    for (TermId p : h.parents(t)) {  // sorted by id == lexicographic order
      if (!inside[p]) continue;
      const auto parent_genes = ann.genes_of(p).size();
      if (parent_genes == 0) {
        throw Error(ErrorCode::kZeroAncestorGenes,
                    h.terms().name(p) + " has no annotated genes");
      }
      const double weight = own / static_cast<double>(parent_genes);
      if (weight > best_weight) {
        best_weight = weight;
        best = p;
      }
    }
    chosen[t] = best;
  }

  std::vector<std::vector<TermId>> kids(h.size());
  for (TermId t : members)
    if (t != root) kids[static_cast<std::size_t>(chosen[t])].push_back(t);

  SubHierarchy sh;
  sh.root = root;
  std::vector<int> local(h.size(), -1);
  std::deque<TermId> queue{root};
  while (!queue.empty()) {
    const TermId t = queue.front();
    queue.pop_front();
    local[t] = static_cast<int>(sh.terms.size());
    sh.terms.push_back(t);
    sh.names.push_back(h.terms().name(t));
    sh.parent.push_back(t == root ? -1 : local[static_cast<std::size_t>(chosen[t])]);
    auto& ch = kids[t];
    std::sort(ch.begin(), ch.end());
    for (TermId c : ch) queue.push_back(c);
  }
  sh.level = levels(sh);
  sh.genes = ann.genes_of(root);
  return sh;
}

/// One tree per root of `h` with at least `min_functions` terms.
inline std::vector<SubHierarchy> split_subhierarchies(const Hierarchy& h,
                                                      const AnnotationMap& ann,
                                                      std::size_t min_functions) {
  std::vector<SubHierarchy> out;
  for (TermId r : h.roots()) {
    if (h.descendants(r).size() < min_functions) continue;
    out.push_back(dag_to_tree(h, r, ann));
  }
  if (out.empty()) {
    throw Error(ErrorCode::kNoSubHierarchies,
                "no root has at least " + std::to_string(min_functions) + " functions");
  }
  return out;
}

inline void write_subhierarchy_report(std::ostream& out, const std::vector<SubHierarchy>& subs) {
  out << "root\tn_functions\tn_genes\tfunctions_per_level\n";
  for (const auto& sh : subs) {
    out << sh.root_name() << '\t' << sh.size() << '\t' << sh.genes.size() << '\t'
        << sh.functions_per_level_string() << '\n';
  }
}

}  // namespace gcnhmc

#endif  // GCNHMC_ONTOLOGY_HPP
