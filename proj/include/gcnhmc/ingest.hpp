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

// Readers and writers for the three input tables and the run configuration.
//
// All tables are tab-separated, one record per line. Blank lines and lines
// starting with '#' are skipped. Every parse error reports the 1-based line
// number it was raised on.

#ifndef GCNHMC_INGEST_HPP
#define GCNHMC_INGEST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/error.hpp"

namespace gcnhmc {

struct EdgeRecord {
  std::string gene_a;
  std::string gene_b;
  double weight = 1.0;

  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

struct AnnotationRecord {
  std::string gene;
  std::string term;

  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

struct HierarchyEdgeRecord {
  std::string child;
  std::string parent;

  friend bool operator==(const HierarchyEdgeRecord&, const HierarchyEdgeRecord&) = default;
};

struct RunConfig {
  std::vector<int> cluster_counts = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  double selection_cutoff = 0.9;
  int folds = 5;
  int min_genes_per_function = 200;
  int min_functions_per_subhierarchy = 10;
  int forest_trees = 200;
  int forest_min_split = 5;
  std::uint64_t seed = 0;
  int eigen_max_iterations = 1000;
  double eigen_tolerance = 1e-10;
  bool strict_closure = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Calls fn(line_number, fields) for each data row.
template <typename Fn>
void for_each_row(std::string_view text, std::size_t columns, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != columns) {
      throw Error(ErrorCode::kMalformedLine,
                  "expected " + std::to_string(columns) + " tab-separated columns, got " +
                      std::to_string(fields.size()),
                  line_no);
    }
    for (auto f : fields) {
      if (f.empty()) throw Error(ErrorCode::kMalformedLine, "empty field", line_no);
    }
    fn(line_no, fields);
  }
}

}  // namespace detail

inline std::vector<EdgeRecord> parse_edges_text(std::string_view text) {
  std::vector<EdgeRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  detail::for_each_row(text, 3, [&](std::size_t line, const auto& f) {
    auto weight = parse_double(f[2]);
    if (!weight || !std::isfinite(*weight)) {
      throw Error(ErrorCode::kMalformedLine, "bad weight '" + std::string(f[2]) + "'", line);
    }
    if (f[0] == f[1]) throw Error(ErrorCode::kSelfLoop, "gene " + std::string(f[0]), line);
    if (*weight < 1.0) {
      throw Error(ErrorCode::kSubThresholdWeight,
                  "weight " + std::string(f[2]) + " is below 1", line);
    }
    std::pair<std::string, std::string> key{f[0], f[1]};
    if (key.second < key.first) std::swap(key.first, key.second);
    if (!seen.insert(key).second) {
      throw Error(ErrorCode::kDuplicateEdge, key.first + " -- " + key.second, line);
    }
    out.push_back({std::string(f[0]), std::string(f[1]), *weight});
  });
  return out;
}

inline std::vector<AnnotationRecord> parse_annotations_text(std::string_view text) {
  std::vector<AnnotationRecord> out;
  std::set<std::pair<std::string_view, std::string_view>> seen;
  detail::for_each_row(text, 2, [&](std::size_t line, const auto& f) {
    if (!seen.emplace(f[0], f[1]).second) {
      throw Error(ErrorCode::kDuplicatePair,
                  std::string(f[0]) + " " + std::string(f[1]), line);
    }
    out.push_back({std::string(f[0]), std::string(f[1])});
  });
  return out;
}

/// Throws CycleDetected naming one cycle if `edges` (child -> parent) is not
/// acyclic.
inline void check_acyclic(const std::vector<HierarchyEdgeRecord>& edges) {
  SymbolTable terms;
  for (const auto& e : edges) {
    terms.intern(e.child);
    terms.intern(e.parent);
  }
  const std::size_t n = terms.size();
  std::vector<std::vector<std::uint32_t>> parents(n);
  std::vector<std::size_t> indegree(n, 0);  // number of children still pending
  for (const auto& e : edges) {
    const auto c = *terms.find(e.child);
    const auto p = *terms.find(e.parent);
    parents[c].push_back(p);
    ++indegree[p];
  }
  std::vector<std::uint32_t> queue;
  for (std::uint32_t t = 0; t < n; ++t)
    if (indegree[t] == 0) queue.push_back(t);
  std::size_t visited = 0;
  while (!queue.empty()) {
    const auto t = queue.back();
    queue.pop_back();
    ++visited;
    for (auto p : parents[t])
      if (--indegree[p] == 0) queue.push_back(p);
  }
  if (visited == n) return;

  // Every remaining node lies on or leads into a cycle; walk parents among
  // the remaining nodes until one repeats.
  std::uint32_t start = 0;
  while (indegree[start] == 0) ++start;
  std::vector<int> position(n, -1);
  std::vector<std::uint32_t> walk;
  std::uint32_t cur = start;
  while (position[cur] < 0) {
    position[cur] = static_cast<int>(walk.size());
    walk.push_back(cur);
    for (auto p : parents[cur]) {
      if (indegree[p] > 0) {
        cur = p;
        break;
      }
    }
  }
  std::string cycle;
  for (std::size_t i = static_cast<std::size_t>(position[cur]); i < walk.size(); ++i)
    cycle += terms.name(walk[i]) + " -> ";
  cycle += terms.name(cur);
  throw Error(ErrorCode::kCycleDetected, cycle);
}

inline std::vector<HierarchyEdgeRecord> parse_hierarchy_text(std::string_view text) {
  std::vector<HierarchyEdgeRecord> out;
  std::set<std::pair<std::string_view, std::string_view>> seen;
  detail::for_each_row(text, 2, [&](std::size_t line, const auto& f) {
    if (f[0] == f[1]) {
      throw Error(ErrorCode::kCycleDetected, std::string(f[0]) + " is its own parent", line);
    }
    if (!seen.emplace(f[0], f[1]).second) {
      throw Error(ErrorCode::kDuplicatePair,
                  std::string(f[0]) + " " + std::string(f[1]), line);
    }
    out.push_back({std::string(f[0]), std::string(f[1])});
  });
  check_acyclic(out);
  return out;
}

inline std::vector<EdgeRecord> parse_edges(const std::filesystem::path& path) {
  return parse_edges_text(detail::read_file(path));
}

inline std::vector<AnnotationRecord> parse_annotations(const std::filesystem::path& path) {
  return parse_annotations_text(detail::read_file(path));
}

inline std::vector<HierarchyEdgeRecord> parse_hierarchy(const std::filesystem::path& path) {
  return parse_hierarchy_text(detail::read_file(path));
}

inline void write_edges(std::ostream& out, const std::vector<EdgeRecord>& edges) {
  for (const auto& e : edges)
    out << e.gene_a << '\t' << e.gene_b << '\t' << format_double(e.weight) << '\n';
}

inline void write_annotations(std::ostream& out, const std::vector<AnnotationRecord>& rows) {
  for (const auto& r : rows) out << r.gene << '\t' << r.term << '\n';
}

inline void write_hierarchy(std::ostream& out, const std::vector<HierarchyEdgeRecord>& rows) {
  for (const auto& r : rows) out << r.child << '\t' << r.parent << '\n';
}

// --- configuration --------------------------------------------------------

inline void validate(const RunConfig& c) {
  auto invalid = [](const std::string& msg) { throw Error(ErrorCode::kInvalidValue, msg); };
  if (c.cluster_counts.empty()) invalid("cluster_counts is empty");
  for (std::size_t i = 0; i < c.cluster_counts.size(); ++i) {
    if (c.cluster_counts[i] < 2) invalid("cluster counts must be >= 2");
    if (i > 0 && c.cluster_counts[i] <= c.cluster_counts[i - 1])
      invalid("cluster_counts must be strictly increasing");
  }
  if (!(c.selection_cutoff >= 0.0 && c.selection_cutoff <= 1.0))
    invalid("selection_cutoff must lie in [0,1]");
  if (c.folds < 2) invalid("folds must be >= 2");
  if (c.min_genes_per_function < 1) invalid("min_genes_per_function must be positive");
  if (c.min_functions_per_subhierarchy < 1)
    invalid("min_functions_per_subhierarchy must be positive");
  if (c.forest_trees < 1) invalid("forest_trees must be positive");
  if (c.forest_min_split < 2) invalid("forest_min_split must be >= 2");
  if (c.eigen_max_iterations < 1) invalid("eigen_max_iterations must be positive");
  if (!(c.eigen_tolerance > 0.0)) invalid("eigen_tolerance must be positive");
}

/// Parses `key=value` lines. Missing keys keep their defaults; unknown keys
/// are rejected. `cluster_counts` is a comma-separated list or a range
/// written `start..stop:step`.
inline RunConfig parse_config_text(std::string_view text) {
  RunConfig config;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;

  auto int_value = [](std::string_view v, std::size_t line) {
    auto parsed = parse_int<long long>(v);
    if (!parsed || *parsed < -2147483647LL || *parsed > 2147483647LL)
      throw Error(ErrorCode::kInvalidValue, "not an integer: '" + std::string(v) + "'", line);
    return static_cast<int>(*parsed);
  };
  auto real_value = [](std::string_view v, std::size_t line) {
    auto parsed = parse_double(v);
    if (!parsed || !std::isfinite(*parsed))
      throw Error(ErrorCode::kInvalidValue, "not a number: '" + std::string(v) + "'", line);
    return *parsed;
  };

  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::kMalformedLine, "expected key=value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second)
      throw Error(ErrorCode::kInvalidValue, "duplicate key " + key, line_no);

    if (key == "cluster_counts") {
      config.cluster_counts.clear();
      if (auto dots = value.find(".."); dots != std::string_view::npos) {
        const auto colon = value.find(':', dots);
        const int start = int_value(trim(value.substr(0, dots)), line_no);
        const int stop = int_value(
            trim(value.substr(dots + 2, colon == std::string_view::npos
                                            ? std::string_view::npos
                                            : colon - dots - 2)),
            line_no);
        const int step =
            colon == std::string_view::npos ? 1 : int_value(trim(value.substr(colon + 1)), line_no);
        if (step < 1) throw Error(ErrorCode::kInvalidValue, "range step must be >= 1", line_no);
        for (int k = start; k <= stop; k += step) config.cluster_counts.push_back(k);
      } else {
        for (auto part : split(value, ',')) config.cluster_counts.push_back(int_value(trim(part), line_no));
      }
    } else if (key == "selection_cutoff") {
      config.selection_cutoff = real_value(value, line_no);
    } else if (key == "folds") {
      config.folds = int_value(value, line_no);
    } else if (key == "min_genes_per_function") {
      config.min_genes_per_function = int_value(value, line_no);
    } else if (key == "min_functions_per_subhierarchy") {
      config.min_functions_per_subhierarchy = int_value(value, line_no);
    } else if (key == "forest_trees") {
      config.forest_trees = int_value(value, line_no);
    } else if (key == "forest_min_split") {
      config.forest_min_split = int_value(value, line_no);
    } else if (key == "seed") {
      auto parsed = parse_int<std::uint64_t>(value);
      if (!parsed)
        throw Error(ErrorCode::kInvalidValue, "seed must be an unsigned 64-bit integer", line_no);
      config.seed = *parsed;
    } else if (key == "eigen_max_iterations") {
      config.eigen_max_iterations = int_value(value, line_no);
    } else if (key == "eigen_tolerance") {
      config.eigen_tolerance = real_value(value, line_no);
    } else if (key == "strict_closure") {
      if (value == "true" || value == "1") config.strict_closure = true;
      else if (value == "false" || value == "0") config.strict_closure = false;
      else throw Error(ErrorCode::kInvalidValue, "strict_closure must be true/false", line_no);
    } else {
      throw Error(ErrorCode::kUnknownKey, key, line_no);
    }

    try {
      validate(config);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()), line_no);
    }
  }
  validate(config);
  return config;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  return parse_config_text(detail::read_file(path));
}

/// Canonical text form; parse_config_text(to_text(c)) == c.
inline std::string to_text(const RunConfig& c) {
  std::ostringstream out;
  out << "cluster_counts=";
  for (std::size_t i = 0; i < c.cluster_counts.size(); ++i)
    out << (i ? "," : "") << c.cluster_counts[i];
  out << "\nselection_cutoff=" << format_double(c.selection_cutoff) << "\nfolds=" << c.folds
      << "\nmin_genes_per_function=" << c.min_genes_per_function
      << "\nmin_functions_per_subhierarchy=" << c.min_functions_per_subhierarchy
      << "\nforest_trees=" << c.forest_trees << "\nforest_min_split=" << c.forest_min_split
      << "\nseed=" << c.seed << "\neigen_max_iterations=" << c.eigen_max_iterations
      << "\neigen_tolerance=" << format_double(c.eigen_tolerance)
      << "\nstrict_closure=" << (c.strict_closure ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace gcnhmc

#endif  // GCNHMC_INGEST_HPP
