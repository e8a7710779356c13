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

// Cluster enrichment features: for every (graph, term, k) column, each gene
// gets the over-representation p-value of the term in its cluster.

#ifndef GCNHMC_ENRICHMENT_HPP
#define GCNHMC_ENRICHMENT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/ontology.hpp"
#include "gcnhmc/spectral.hpp"

namespace gcnhmc {

/// Tabulated log-factorials, log(i!) for i <= n.
class LogFactorialTable {
 public:
  explicit LogFactorialTable(std::size_t n = 0) { reserve(n); }

  void reserve(std::size_t n) {
    if (table_.empty()) table_.push_back(0.0);
    while (table_.size() <= n) table_.push_back(std::lgamma(static_cast<double>(table_.size()) + 1.0));
  }

  double operator()(std::size_t i) const { return table_.at(i); }
  double log_choose(std::size_t n, std::size_t k) const {
    return (*this)(n) - (*this)(k) - (*this)(n - k);
  }

 private:
  std::vector<double> table_;
};

/// P[X >= x] for X ~ Hypergeometric(population, successes, draws), i.e. the
/// one-sided Fisher exact test for over-representation.
inline double hypergeom_tail(std::int64_t x, std::int64_t population, std::int64_t successes,
                             std::int64_t draws, LogFactorialTable& lf) {
  if (population < 0 || successes < 0 || draws < 0 || successes > population ||
      draws > population || x < 0 || x > std::min(successes, draws)) {
    throw Error(ErrorCode::kInvalidCounts,
                "x=" + std::to_string(x) + " M=" + std::to_string(population) +
                    " n=" + std::to_string(successes) + " N=" + std::to_string(draws));
  }
  const std::int64_t lo = std::max<std::int64_t>(0, draws + successes - population);
  const std::int64_t hi = std::min(successes, draws);
  if (x <= lo) return 1.0;
  lf.reserve(static_cast<std::size_t>(population));
  const auto M = static_cast<std::size_t>(population);
  const auto n = static_cast<std::size_t>(successes);
  const auto N = static_cast<std::size_t>(draws);
  const double log_total = lf.log_choose(M, N);
  auto log_term = [&](std::int64_t i) {
    const auto k = static_cast<std::size_t>(i);
    return lf.log_choose(n, k) + lf.log_choose(M - n, N - k) - log_total;
  };
  // Sum whichever tail is shorter relative to the mode; the terms are
  // combined relative to their maximum to stay in range.
  auto log_sum = [&](std::int64_t a, std::int64_t b) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = a; i <= b; ++i) peak = std::max(peak, log_term(i));
    double acc = 0.0;
    for (std::int64_t i = a; i <= b; ++i) acc += std::exp(log_term(i) - peak);
    return std::exp(peak) * acc;
  };
  const double mode = std::floor((static_cast<double>(draws) + 1.0) *
                                 (static_cast<double>(successes) + 1.0) /
                                 (static_cast<double>(population) + 2.0));
  double p = 0.0;
  if (static_cast<double>(x) > mode) p = log_sum(x, hi);
  else p = 1.0 - log_sum(lo, x - 1);
  return std::clamp(p, 0.0, 1.0);
}

inline double hypergeom_tail(std::int64_t x, std::int64_t population, std::int64_t successes,
                             std::int64_t draws) {
  LogFactorialTable lf(static_cast<std::size_t>(std::max<std::int64_t>(population, 0)));
  return hypergeom_tail(x, population, successes, draws, lf);
}

struct FeatureDescriptor {
  GraphTag graph = GraphTag::kG;
  std::string term;
  int cluster_count = 0;

  /// "TAG|term|k"
  std::string id() const {
    return std::string(1, tag_char(graph)) + "|" + term + "|" + std::to_string(cluster_count);
  }

  static FeatureDescriptor parse(std::string_view id) {
    const auto first = id.find('|');
    const auto last = id.rfind('|');
    if (first == std::string_view::npos || first == last)
      throw Error(ErrorCode::kMalformedLine, "bad feature id '" + std::string(id) + "'");
    auto k = parse_int<int>(id.substr(last + 1));
    if (!k) throw Error(ErrorCode::kMalformedLine, "bad cluster count in '" + std::string(id) + "'");
    return {parse_graph_tag(id.substr(0, first)),
            std::string(id.substr(first + 1, last - first - 1)), *k};
  }

  friend bool operator==(const FeatureDescriptor&, const FeatureDescriptor&) = default;
};

/// Genes x feature columns of enrichment p-values.
struct FeatureMatrix {
  std::vector<std::string> genes;
  std::vector<FeatureDescriptor> columns;
  Eigen::MatrixXd values;  // genes.size() x columns.size()

  std::size_t rows() const { return genes.size(); }
  std::size_t cols() const { return columns.size(); }

  /// Sub-matrix of the given rows and columns, in the given orders.
  FeatureMatrix slice(const std::vector<std::size_t>& row_ids,
                      const std::vector<std::size_t>& col_ids) const {
    FeatureMatrix out;
    out.values.resize(static_cast<Eigen::Index>(row_ids.size()),
                      static_cast<Eigen::Index>(col_ids.size()));
    for (auto r : row_ids) out.genes.push_back(genes.at(r));
    for (auto c : col_ids) out.columns.push_back(columns.at(c));
    for (std::size_t j = 0; j < col_ids.size(); ++j)
      for (std::size_t i = 0; i < row_ids.size(); ++i)
        out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            values(static_cast<Eigen::Index>(row_ids[i]), static_cast<Eigen::Index>(col_ids[j]));
    return out;
  }
};

/// Enrichment p-values of `terms` in the clusters of `clusters`. `ann` must
/// be indexed by the same gene list as the clustered graph.
inline FeatureMatrix enrich(const ClusterMatrix& clusters, const AnnotationMap& ann,
                            const Hierarchy& h, const std::vector<TermId>& terms, GraphTag tag) {
  if (clusters.genes != ann.genes().names())
    throw Error(ErrorCode::kGeneSetMismatch, "cluster and annotation gene lists differ");
  const std::size_t n_genes = clusters.genes.size();
  const std::size_t n_k = clusters.cluster_counts.size();

  FeatureMatrix out;
  out.genes = clusters.genes;
  for (TermId t : terms)
    for (int k : clusters.cluster_counts) out.columns.push_back({tag, h.terms().name(t), k});
  out.values.resize(static_cast<Eigen::Index>(n_genes), static_cast<Eigen::Index>(out.columns.size()));

  LogFactorialTable lf(n_genes);
  parallel_for(terms.size(), [&](std::size_t ti) {
    const auto& members = ann.genes_of(terms[ti]);
    const auto annotated = static_cast<std::int64_t>(members.size());
    for (std::size_t ki = 0; ki < n_k; ++ki) {
      const auto& labels = clusters.assignment[ki];
      const int n_clusters = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
      std::vector<std::int64_t> size(static_cast<std::size_t>(n_clusters), 0);
      std::vector<std::int64_t> hits(static_cast<std::size_t>(n_clusters), 0);
      for (int l : labels) ++size[static_cast<std::size_t>(l)];
      for (GeneId g : members) ++hits[static_cast<std::size_t>(labels[g])];
      std::vector<double> pvalue(static_cast<std::size_t>(n_clusters));
      for (std::size_t c = 0; c < pvalue.size(); ++c)
        pvalue[c] = hypergeom_tail(hits[c], static_cast<std::int64_t>(n_genes), annotated, size[c], lf);
      const auto col = static_cast<Eigen::Index>(ti * n_k + ki);
      for (std::size_t g = 0; g < n_genes; ++g)
        out.values(static_cast<Eigen::Index>(g), col) = pvalue[static_cast<std::size_t>(labels[g])];
    }
  });
  return out;
}

/// Columns of `g` followed by columns of `f`.
inline FeatureMatrix concat_features(const FeatureMatrix& g, const FeatureMatrix& f) {
  if (f.cols() == 0 && f.rows() == 0) return g;
  if (g.genes != f.genes) throw Error(ErrorCode::kGeneOrderMismatch, "feature matrices disagree on genes");
  FeatureMatrix out;
  out.genes = g.genes;
  out.columns = g.columns;
  out.columns.insert(out.columns.end(), f.columns.begin(), f.columns.end());
  out.values.resize(g.values.rows(), g.values.cols() + f.values.cols());
  out.values << g.values, f.values;
  return out;
}

inline void write_features(std::ostream& out, const FeatureMatrix& m) {
  out << "gene";
  for (const auto& c : m.columns) out << '\t' << c.id();
  out << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << m.genes[i];
    for (std::size_t j = 0; j < m.cols(); ++j)
      out << '\t' << format_double(m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out << '\n';
  }
}

inline FeatureMatrix read_features_text(std::string_view text) {
  FeatureMatrix m;
  std::vector<std::vector<double>> rows;
  bool header = true;
  std::size_t line_no = 0, pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (header) {
      if (fields.front() != "gene")
        throw Error(ErrorCode::kMalformedLine, "feature header must start with 'gene'", line_no);
      for (std::size_t j = 1; j < fields.size(); ++j) m.columns.push_back(FeatureDescriptor::parse(fields[j]));
      header = false;
      continue;
    }
    if (fields.size() != m.columns.size() + 1)
      throw Error(ErrorCode::kMalformedLine, "wrong column count", line_no);
    m.genes.emplace_back(fields[0]);
    auto& row = rows.emplace_back();
    for (std::size_t j = 1; j < fields.size(); ++j) {
      auto v = parse_double(fields[j]);
      if (!v || *v < 0.0 || *v > 1.0)
        throw Error(ErrorCode::kMalformedLine, "feature value must be a p-value", line_no);
      row.push_back(*v);
    }
  }
  m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

inline FeatureMatrix read_features(const std::filesystem::path& path) {
  return read_features_text(detail::read_file(path));
}

}  // namespace gcnhmc

#endif  // GCNHMC_ENRICHMENT_HPP
