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

// Synthetic planted-partition datasets with hierarchy-consistent
// annotations. Genes are split into contiguous blocks; blocks are densely
// connected inside and sparsely across. Each term's planted gene set is a
// union of blocks, chosen top-down so every child's blocks are a subset of
// its parent's.

#ifndef GCNHMC_SYNTH_HPP
#define GCNHMC_SYNTH_HPP

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/ingest.hpp"

namespace gcnhmc {

enum class HierarchyShape { kChain, kStar, kBinaryTree, kCustom };

inline HierarchyShape parse_shape(std::string_view name) {
  if (name == "chain") return HierarchyShape::kChain;
  if (name == "star") return HierarchyShape::kStar;
  if (name == "binary-tree") return HierarchyShape::kBinaryTree;
  if (name == "custom") return HierarchyShape::kCustom;
  throw Error(ErrorCode::kInvalidValue, "unknown hierarchy shape '" + std::string(name) + "'");
}

struct SynthSpec {
  int n_genes = 60;
  int n_blocks = 3;
  double in_block_weight_min = 1.5;
  double in_block_weight_max = 5.0;
  double in_block_edge_prob = 0.6;
  double cross_block_edge_prob = 0.01;
  HierarchyShape shape = HierarchyShape::kChain;
  int terms_per_hierarchy = 4;
  int n_hierarchies = 1;
  std::vector<HierarchyEdgeRecord> custom_edges;  // used with kCustom
  double signal = 0.5;  // chance a parent's block is kept by a child
  double noise = 0.0;   // flip rate of leaf-term memberships
  std::uint64_t seed = 1;
};

struct SynthDataset {
  std::vector<EdgeRecord> edges;
  std::vector<AnnotationRecord> annotations;
  std::vector<HierarchyEdgeRecord> hierarchy;
  std::vector<std::string> genes;
  std::vector<int> block_of;                        // per gene
  std::vector<std::string> terms;                   // every term
  std::vector<std::vector<int>> term_blocks;        // planted blocks per term
  std::vector<std::vector<std::uint8_t>> planted;   // term x gene, before noise
  std::vector<std::vector<std::uint8_t>> emitted;   // term x gene, after noise
  std::vector<char> is_leaf;                        // per term

  nlohmann::json plant_record() const {
    nlohmann::json blocks = nlohmann::json::object();
    for (std::size_t g = 0; g < genes.size(); ++g) blocks[genes[g]] = block_of[g];
    nlohmann::json term_sets = nlohmann::json::object();
    for (std::size_t t = 0; t < terms.size(); ++t) {
      std::vector<std::string> members;
      for (std::size_t g = 0; g < genes.size(); ++g)
        if (planted[t][g]) members.push_back(genes[g]);
      term_sets[terms[t]] = {{"blocks", term_blocks[t]}, {"genes", members}};
    }
    return {{"format", "gcnhmc-plant"}, {"version", 1}, {"gene_blocks", blocks}, {"terms", term_sets}};
  }
};

inline void validate(const SynthSpec& s) {
  auto infeasible = [](const std::string& msg) { throw Error(ErrorCode::kInfeasibleSpec, msg); };
  if (s.n_genes < 2) infeasible("need at least 2 genes");
  if (s.n_blocks < 1 || s.n_blocks > s.n_genes) infeasible("blocks must lie in [1, n_genes]");
  if (s.in_block_weight_min < 1.0 || s.in_block_weight_max < s.in_block_weight_min)
    infeasible("in-block weight range must satisfy 1 <= min <= max");
  if (!(s.in_block_weight_max > 1.0)) infeasible("maximum weight must exceed 1");
  for (double p : {s.in_block_edge_prob, s.cross_block_edge_prob, s.signal, s.noise})
    if (!(p >= 0.0 && p <= 1.0)) infeasible("probabilities must lie in [0,1]");
  if (s.shape != HierarchyShape::kCustom && (s.terms_per_hierarchy < 1 || s.n_hierarchies < 1))
    infeasible("need at least one term per hierarchy");
  if (s.shape == HierarchyShape::kCustom && s.custom_edges.empty()) infeasible("custom shape needs edges");
}

inline SynthDataset generate(const SynthSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(derive_seed(spec.seed, {tag_of("synth")}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SynthDataset d;

  const int width = static_cast<int>(std::to_string(spec.n_genes - 1).size());
  for (int g = 0; g < spec.n_genes; ++g) {
    std::string id = std::to_string(g);
    d.genes.push_back("g" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id);
    d.block_of.push_back(static_cast<int>(static_cast<long long>(g) * spec.n_blocks / spec.n_genes));
  }

  std::uniform_real_distribution<double> weight(spec.in_block_weight_min, spec.in_block_weight_max);
  for (int a = 0; a < spec.n_genes; ++a)
    for (int b = a + 1; b < spec.n_genes; ++b) {
      const bool same = d.block_of[static_cast<std::size_t>(a)] == d.block_of[static_cast<std::size_t>(b)];
      if (unit(rng) < (same ? spec.in_block_edge_prob : spec.cross_block_edge_prob)) {
        const double w = same ? weight(rng) : 1.0;
        d.edges.push_back({d.genes[static_cast<std::size_t>(a)], d.genes[static_cast<std::size_t>(b)], w});
      }
    }

  // Term tree(s): parent index per term, -1 for roots; parents come first.
  std::vector<int> parent;
  if (spec.shape == HierarchyShape::kCustom) {
    SymbolTable names;
    for (const auto& e : spec.custom_edges) {
      names.intern(e.child);
      names.intern(e.parent);
    }
    // Custom shapes are trees given child->parent; order them top-down.
    std::vector<int> par(names.size(), -1);
    for (const auto& e : spec.custom_edges) {
      auto& slot = par[*names.find(e.child)];
      if (slot >= 0) throw Error(ErrorCode::kInfeasibleSpec, "custom shape must be a tree");
      slot = static_cast<int>(*names.find(e.parent));
    }
    check_acyclic(spec.custom_edges);
    std::vector<int> order, placed(names.size(), 0);
    while (order.size() < names.size())
      for (std::size_t t = 0; t < names.size(); ++t)
        if (!placed[t] && (par[t] < 0 || placed[static_cast<std::size_t>(par[t])])) {
          placed[t] = 1;
          order.push_back(static_cast<int>(t));
        }
    std::vector<int> position(names.size());
    for (std::size_t i = 0; i < order.size(); ++i) position[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    for (int t : order) {
      d.terms.push_back(names.name(static_cast<std::uint32_t>(t)));
      parent.push_back(par[static_cast<std::size_t>(t)] < 0 ? -1 : position[static_cast<std::size_t>(par[static_cast<std::size_t>(t)])]);
    }
  } else {
    const int n = spec.terms_per_hierarchy;
    const int digits = static_cast<int>(std::to_string(n - 1).size());
    for (int h = 0; h < spec.n_hierarchies; ++h) {
      const int offset = static_cast<int>(d.terms.size());
      for (int i = 0; i < n; ++i) {
        std::string id = std::to_string(i);
        d.terms.push_back("T" + std::to_string(h) + "_" +
                          std::string(static_cast<std::size_t>(digits) - id.size(), '0') + id);
        int p = -1;
        if (i > 0) {
          switch (spec.shape) {
            case HierarchyShape::kChain: p = i - 1; break;
            case HierarchyShape::kStar: p = 0; break;
            default: p = (i - 1) / 2; break;
          }
        }
        parent.push_back(p < 0 ? -1 : offset + p);
      }
    }
  }
  const std::size_t n_terms = d.terms.size();
  d.is_leaf.assign(n_terms, 1);
  for (std::size_t t = 0; t < n_terms; ++t) {
    if (parent[t] >= 0) {
      d.is_leaf[static_cast<std::size_t>(parent[t])] = 0;
      d.hierarchy.push_back({d.terms[t], d.terms[static_cast<std::size_t>(parent[t])]});
    }
  }

  d.term_blocks.resize(n_terms);
  for (std::size_t t = 0; t < n_terms; ++t) {
    if (parent[t] < 0) {
      for (int b = 0; b < spec.n_blocks; ++b) d.term_blocks[t].push_back(b);
      continue;
    }
    const auto& from = d.term_blocks[static_cast<std::size_t>(parent[t])];
    for (int b : from)
      if (unit(rng) < spec.signal) d.term_blocks[t].push_back(b);
    if (d.term_blocks[t].empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, from.size() - 1);
      d.term_blocks[t].push_back(from[pick(rng)]);
    }
  }

  const auto n_genes = static_cast<std::size_t>(spec.n_genes);
  d.planted.assign(n_terms, std::vector<std::uint8_t>(n_genes, 0));
  for (std::size_t t = 0; t < n_terms; ++t)
    for (std::size_t g = 0; g < n_genes; ++g)
      d.planted[t][g] = std::find(d.term_blocks[t].begin(), d.term_blocks[t].end(), d.block_of[g]) !=
                        d.term_blocks[t].end();

  d.emitted = d.planted;
  for (std::size_t t = 0; t < n_terms; ++t) {
    if (!d.is_leaf[t] || parent[t] < 0) continue;
    for (std::size_t g = 0; g < n_genes; ++g)
      if (unit(rng) < spec.noise) d.emitted[t][g] ^= 1;
  }
  // Re-close: a positive leaf implies all its ancestors.
  for (std::size_t t = n_terms; t-- > 0;)
    if (parent[t] >= 0)
      for (std::size_t g = 0; g < n_genes; ++g)
        if (d.emitted[t][g]) d.emitted[static_cast<std::size_t>(parent[t])][g] = 1;

  for (std::size_t g = 0; g < n_genes; ++g)
    for (std::size_t t = 0; t < n_terms; ++t)
      if (d.emitted[t][g]) d.annotations.push_back({d.genes[g], d.terms[t]});
  return d;
}

/// Writes edges.tsv, annotations.tsv, hierarchy.tsv and plant.json.
inline void write_dataset(const SynthDataset& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("edges.tsv");
    out << "# gene_a\tgene_b\tweight\n";
    write_edges(out, d.edges);
  }
  {
    auto out = open("annotations.tsv");
    out << "# gene\tterm\n";
    write_annotations(out, d.annotations);
  }
  {
    auto out = open("hierarchy.tsv");
    out << "# child\tparent\n";
    write_hierarchy(out, d.hierarchy);
  }
  auto out = open("plant.json");
  out << d.plant_record().dump(2) << '\n';
}

}  // namespace gcnhmc

#endif  // GCNHMC_SYNTH_HPP
