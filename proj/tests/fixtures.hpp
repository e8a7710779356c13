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

// Small hand-built inputs shared by the unit tests.

#ifndef GCNHMC_TESTS_FIXTURES_HPP
#define GCNHMC_TESTS_FIXTURES_HPP

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gcnhmc/gcnhmc.hpp"

namespace gcnhmc::testing {

inline Hierarchy hierarchy(const std::vector<std::pair<std::string, std::string>>& child_parent) {
  std::vector<HierarchyEdgeRecord> edges;
  for (const auto& [c, p] : child_parent) edges.push_back({c, p});
  return Hierarchy::from_edges(edges);
}

/// Closed annotations from gene -> terms lists over `h`.
inline AnnotationMap annotations(const std::vector<std::pair<std::string, std::vector<std::string>>>& rows,
                                 const Hierarchy& h) {
  std::vector<AnnotationRecord> records;
  std::vector<std::string> genes;
  for (const auto& [g, terms] : rows) {
    genes.push_back(g);
    for (const auto& t : terms) records.push_back({g, t});
  }
  return true_path_close(AnnotationMap::from_records(records, SymbolTable::from_names(genes), h), h);
}

/// Annotations where term t carries exactly the listed genes (no closure).
inline AnnotationMap term_sets(const Hierarchy& h, const std::vector<std::pair<std::string, int>>& sizes,
                               int n_genes) {
  std::vector<std::string> names;
  for (int g = 0; g < n_genes; ++g) names.push_back("g" + std::string(g < 10 ? "0" : "") + std::to_string(g));
  std::vector<AnnotationRecord> records;
  for (const auto& [term, count] : sizes)
    for (int g = 0; g < count; ++g) records.push_back({names[static_cast<std::size_t>(g)], term});
  return AnnotationMap::from_records(records, SymbolTable::from_names(names), h);
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("gcnhmc-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name, std::ios::binary) << text;
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) { return detail::read_file(p); }

}  // namespace gcnhmc::testing

#endif  // GCNHMC_TESTS_FIXTURES_HPP
