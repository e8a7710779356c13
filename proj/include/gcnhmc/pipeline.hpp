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

// End-to-end stages: features, predict, evaluate and feature-source
// ablation. Every stage writes to temporary files and renames them only
// after it succeeds, records SHA-256 digests in <out>/manifest.json and is
// skipped when a cache stamp shows identical inputs and intact outputs.

#ifndef GCNHMC_PIPELINE_HPP
#define GCNHMC_PIPELINE_HPP

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gcnhmc/core.hpp"
#include "gcnhmc/enrichment.hpp"
#include "gcnhmc/error.hpp"
#include "gcnhmc/eval.hpp"
#include "gcnhmc/graph.hpp"
#include "gcnhmc/hmc.hpp"
#include "gcnhmc/ingest.hpp"
#include "gcnhmc/learn.hpp"
#include "gcnhmc/ontology.hpp"
#include "gcnhmc/spectral.hpp"

namespace gcnhmc {

namespace fs = std::filesystem;

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::kInternal, "SHA-256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < length; ++i)
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return out.str();
}

inline std::string file_digest(const fs::path& path) { return sha256_hex(detail::read_file(path)); }

struct StageContext {
  fs::path out_dir;
  fs::path cache_dir;  // empty: GCNHMC_CACHE_DIR or <out>/.gcnhmc-cache
  RunConfig config;
  bool use_cache = true;
  std::ostream* log = nullptr;

  fs::path resolved_cache_dir() const {
    if (!cache_dir.empty()) return cache_dir;
    if (const char* env = std::getenv("GCNHMC_CACHE_DIR"); env && *env) return env;
    return out_dir / ".gcnhmc-cache";
  }
  void note(const std::string& message) const {
    if (log) *log << message << '\n';
  }
};

struct StageResult {
  bool cached = false;
  std::vector<fs::path> outputs;
  std::vector<std::string> warnings;
};

namespace detail {

/// Output files of one stage, staged under temporary names. Anything not
/// committed is removed on destruction.
class StagedOutputs {
 public:
  explicit StagedOutputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  StagedOutputs(const StagedOutputs&) = delete;
  StagedOutputs& operator=(const StagedOutputs&) = delete;
  ~StagedOutputs() {
    std::error_code ec;
    for (const auto& [name, tmp] : staged_) fs::remove(tmp, ec);
  }

  std::ofstream open(const std::string& name) {
    const fs::path tmp = dir_ / ("." + name + ".partial");
    staged_.emplace_back(name, tmp);
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    return out;
  }

  std::vector<fs::path> commit() {
    std::vector<fs::path> final_paths;
    for (const auto& [name, tmp] : staged_) {
      const fs::path target = dir_ / name;
      fs::rename(tmp, target);
      final_paths.push_back(target);
    }
    staged_.clear();
    return final_paths;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, fs::path>> staged_;
};

inline fs::path stamp_path(const StageContext& ctx, const std::string& stage) {
  const auto dir_key = sha256_hex(fs::absolute(ctx.out_dir).lexically_normal().string()).substr(0, 16);
  return ctx.resolved_cache_dir() / (stage + "-" + dir_key + ".json");
}

/// Digest over the stage name, canonical config, input digests and extras.
inline std::string stage_key(const std::string& stage, const RunConfig& config,
                             const std::map<std::string, std::string>& input_digests,
                             const std::string& extra) {
  std::string text = stage + "\n" + to_text(config) + "\n" + extra + "\n";
  for (const auto& [role, digest] : input_digests) text += role + "=" + digest + "\n";
  return sha256_hex(text);
}

inline bool cache_hit(const StageContext& ctx, const std::string& stage, const std::string& key,
                      std::vector<fs::path>* outputs) {
  if (!ctx.use_cache) return false;
  const auto stamp = stamp_path(ctx, stage);
  if (!fs::exists(stamp)) return false;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(stamp));
  } catch (const std::exception&) {
    return false;
  }
  if (j.value("key", "") != key) return false;
  outputs->clear();
  for (const auto& [name, digest] : j.at("outputs").items()) {
    const auto path = ctx.out_dir / name;
    if (!fs::exists(path) || file_digest(path) != digest.get<std::string>()) return false;
    outputs->push_back(path);
  }
  return true;
}

inline void record_stage(const StageContext& ctx, const std::string& stage, const std::string& key,
                         const std::map<std::string, std::string>& input_digests,
                         const std::vector<fs::path>& outputs, double seconds) {
  nlohmann::json out_digests = nlohmann::json::object();
  for (const auto& p : outputs) out_digests[p.filename().string()] = file_digest(p);

  const auto manifest_path = ctx.out_dir / "manifest.json";
  nlohmann::json manifest = nlohmann::json::object();
  if (fs::exists(manifest_path)) {
    try {
      manifest = nlohmann::json::parse(read_file(manifest_path));
    } catch (const std::exception&) {
      manifest = nlohmann::json::object();
    }
  }
  manifest["format"] = "gcnhmc-manifest";
  manifest["seed"] = ctx.config.seed;
  manifest["config_digest"] = sha256_hex(to_text(ctx.config));
  manifest["stages"][stage] = {{"key", key}, {"inputs", input_digests}, {"outputs", out_digests},
                               {"seconds", seconds}};
  {
    StagedOutputs staged(ctx.out_dir);
    staged.open("manifest.json") << manifest.dump(2) << '\n';
    staged.commit();
  }

  if (!ctx.use_cache) return;
  const auto stamp = stamp_path(ctx, stage);
  StagedOutputs staged(stamp.parent_path());
  staged.open(stamp.filename().string()) << nlohmann::json{{"key", key}, {"outputs", out_digests}}.dump(2)
                                         << '\n';
  staged.commit();
}

/// Runs `body` unless the cache already holds its outputs.
template <typename Body>
StageResult run_stage(const StageContext& ctx, const std::string& stage,
                      const std::map<std::string, fs::path>& inputs, const std::string& extra, Body&& body) {
  std::map<std::string, std::string> digests;
  for (const auto& [role, path] : inputs) digests[role] = file_digest(path);
  const auto key = stage_key(stage, ctx.config, digests, extra);
  StageResult result;
  if (cache_hit(ctx, stage, key, &result.outputs)) {
    result.cached = true;
    ctx.note(stage + ": cached");
    return result;
  }
  const auto start = std::chrono::steady_clock::now();
  StagedOutputs staged(ctx.out_dir);
  body(staged, result);
  result.outputs = staged.commit();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  record_stage(ctx, stage, key, digests, result.outputs, seconds);
  ctx.note(stage + ": done in " + format_double(std::round(seconds * 100) / 100) + " s");
  return result;
}

/// Closed annotations over `genes`; strict mode rejects open input.
inline AnnotationMap closed_annotations(const std::vector<AnnotationRecord>& records, const SymbolTable& genes,
                                        const Hierarchy& h, const RunConfig& config, std::size_t* dropped) {
  auto raw = AnnotationMap::from_records(records, genes, h, dropped);
  if (config.strict_closure) {
    require_closed(raw, h);
    return raw;
  }
  return true_path_close(raw, h);
}

struct Labelled {
  Hierarchy hierarchy;
  AnnotationMap closed;
  Hierarchy filtered_hierarchy;
  AnnotationMap filtered;
};

inline Labelled load_labels(const fs::path& annotations, const fs::path& hierarchy, const SymbolTable& genes,
                            const RunConfig& config, const StageContext& ctx) {
  Labelled l;
  l.hierarchy = Hierarchy::from_edges(parse_hierarchy(hierarchy));
  std::size_t dropped = 0;
  l.closed = closed_annotations(parse_annotations(annotations), genes, l.hierarchy, config, &dropped);
  if (dropped > 0) ctx.note("annotations: dropped " + std::to_string(dropped) + " rows for genes outside the network");
  auto [fh, fa] = filter_functions(l.closed, l.hierarchy, static_cast<std::size_t>(config.min_genes_per_function));
  l.filtered_hierarchy = std::move(fh);
  l.filtered = std::move(fa);
  return l;
}

inline std::vector<std::size_t> term_columns(const FeatureMatrix& m, const std::set<std::string>& terms) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (terms.count(m.columns[c].term)) cols.push_back(c);
  return cols;
}

/// Rows of `sh.genes` and the columns of `sh`'s terms, G block then F block.
inline FeatureMatrix subhierarchy_features(const SubHierarchy& sh, const FeatureMatrix* g, const FeatureMatrix* f,
                                           const SymbolTable& genes) {
  std::vector<std::size_t> rows;
  for (GeneId id : sh.genes) rows.push_back(id);
  const std::set<std::string> terms(sh.names.begin(), sh.names.end());
  FeatureMatrix out;
  if (g) out = g->slice(rows, term_columns(*g, terms));
  if (f) {
    auto part = f->slice(rows, term_columns(*f, terms));
    out = g ? concat_features(out, part) : std::move(part);
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (out.genes[i] != genes.name(static_cast<GeneId>(rows[i])))
      throw Error(ErrorCode::kGeneOrderMismatch, "feature rows do not follow the gene table");
  return out;
}

inline void check_feature_pair(const FeatureMatrix& g, const FeatureMatrix& f) {
  if (g.genes != f.genes) throw Error(ErrorCode::kGeneOrderMismatch, "J_G and J_F list different genes");
  if (!std::is_sorted(g.genes.begin(), g.genes.end()) ||
      std::adjacent_find(g.genes.begin(), g.genes.end()) != g.genes.end())
    throw Error(ErrorCode::kGeneOrderMismatch, "feature rows must be sorted unique gene ids");
  for (const auto& c : g.columns)
    if (c.graph != GraphTag::kG) throw Error(ErrorCode::kFeatureMismatch, "J_G holds a non-G column");
  for (const auto& c : f.columns)
    if (c.graph != GraphTag::kF) throw Error(ErrorCode::kFeatureMismatch, "J_F holds a non-F column");
}

inline TrainOptions train_options(const RunConfig& config, const SubHierarchy& sh) {
  TrainOptions options;
  options.forest.n_trees = config.forest_trees;
  options.forest.min_samples_split = config.forest_min_split;
  options.forest.seed = derive_seed(config.seed, {tag_of("forest"), tag_of(sh.root_name())});
  options.cutoff = config.selection_cutoff;
  return options;
}

inline FoldPlan folds_for(const SubHierarchy& sh, const LabelMatrix& labels, const RunConfig& config) {
  return stratified_kfold(labels, config.folds, derive_seed(config.seed, {tag_of("cv"), tag_of(sh.root_name())}));
}

inline void write_predictions(std::ostream& out, const std::vector<std::pair<std::string, PredictionTable>>& rows) {
  out << "sub_hierarchy_root\tmethod\tgene\tterm\tprobability\n";
  for (const auto& [method, table] : rows)
    for (std::size_t g = 0; g < table.genes.size(); ++g)
      for (std::size_t t = 0; t < table.terms.size(); ++t)
        out << table.root << '\t' << method << '\t' << table.genes[g] << '\t' << table.terms[t] << '\t'
            << format_double(table.probs(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(t))) << '\n';
}

}  // namespace detail

inline std::vector<StrategyKind> parse_methods(std::string_view method) {
  if (method == "all") return {std::begin(kAllStrategies), std::end(kAllStrategies)};
  return {parse_strategy(method)};
}

struct PredictionSet {
  // (method, table) in output order: sub-hierarchy-major, then method.
  std::vector<std::pair<std::string, PredictionTable>> tables;
};

/// Reads predictions.tsv. Each (root, method) block must be a full
/// gene x term grid whose first term is the root.
inline PredictionSet read_predictions_text(std::string_view text) {
  const auto header_end = text.find('\n');
  const std::string_view first = text.substr(0, header_end);
  if (first.rfind("sub_hierarchy_root", 0) == 0) text.remove_prefix(header_end == std::string_view::npos ? text.size() : header_end + 1);

  struct Block {
    std::string root, method;
    std::vector<std::string> genes, terms;
    std::map<std::string, std::size_t> gene_index, term_index;
    std::map<std::pair<std::size_t, std::size_t>, double> values;
  };
  std::vector<Block> blocks;
  std::map<std::pair<std::string, std::string>, std::size_t> block_index;
  detail::for_each_row(text, 5, [&](std::size_t line, const auto& f) {
    const std::pair<std::string, std::string> key{std::string(f[0]), std::string(f[1])};
    auto [it, fresh] = block_index.emplace(key, blocks.size());
    if (fresh) blocks.push_back({key.first, key.second, {}, {}, {}, {}, {}});
    auto& b = blocks[it->second];
    auto index_of = [](std::map<std::string, std::size_t>& idx, std::vector<std::string>& names, std::string_view n) {
      auto [pos, added] = idx.emplace(std::string(n), names.size());
      if (added) names.emplace_back(n);
      return pos->second;
    };
    const auto g = index_of(b.gene_index, b.genes, f[2]);
    const auto t = index_of(b.term_index, b.terms, f[3]);
    auto p = parse_double(f[4]);
    if (!p || *p < 0.0 || *p > 1.0) throw Error(ErrorCode::kMalformedLine, "probability must lie in [0,1]", line);
    if (!b.values.emplace(std::pair{g, t}, *p).second)
      throw Error(ErrorCode::kDuplicatePair, "repeated gene/term row", line);
  });

  PredictionSet set;
  for (auto& b : blocks) {
    if (b.terms.empty() || b.terms.front() != b.root)
      throw Error(ErrorCode::kInvalidValue, "block " + b.root + "/" + b.method + " must list its root first");
    if (b.values.size() != b.genes.size() * b.terms.size())
      throw Error(ErrorCode::kInvalidValue, "block " + b.root + "/" + b.method + " is not a full gene x term grid");
    PredictionTable table;
    table.root = b.root;
    table.genes = b.genes;
    table.terms = b.terms;
    table.parent.assign(b.terms.size(), 0);
    table.parent[0] = -1;
    table.probs.resize(static_cast<Eigen::Index>(b.genes.size()), static_cast<Eigen::Index>(b.terms.size()));
    for (const auto& [gt, v] : b.values)
      table.probs(static_cast<Eigen::Index>(gt.first), static_cast<Eigen::Index>(gt.second)) = v;
    set.tables.emplace_back(b.method, std::move(table));
  }
  if (set.tables.empty()) throw Error(ErrorCode::kInvalidValue, "predictions cover no sub-hierarchy");
  return set;
}

/// Affinity graph, spectral sweeps on G and F, enrichment of the filtered
/// terms. Writes features_G.tsv, features_F.tsv and subhierarchies.tsv.
inline StageResult cmd_features(const StageContext& ctx, const fs::path& edges, const fs::path& annotations,
                                const fs::path& hierarchy) {
  validate(ctx.config);
  return detail::run_stage(
      ctx, "features", {{"edges", edges}, {"annotations", annotations}, {"hierarchy", hierarchy}}, "",
      [&](detail::StagedOutputs& staged, StageResult& result) {
        const auto net = Network::from_edges(parse_edges(edges));
        const int largest = *std::max_element(ctx.config.cluster_counts.begin(), ctx.config.cluster_counts.end());
        if (static_cast<std::size_t>(largest) >= net.node_count())
          throw Error(ErrorCode::kInvalidValue, "cluster count " + std::to_string(largest) +
                                                    " is not below the gene count " +
                                                    std::to_string(net.node_count()));
        const auto labels = detail::load_labels(annotations, hierarchy, net.genes(), ctx.config, ctx);
        std::vector<TermId> terms(labels.filtered_hierarchy.size());
        std::iota(terms.begin(), terms.end(), TermId{0});
        if (terms.empty()) result.warnings.push_back("no function has more than min_genes_per_function genes");
        ctx.note("features: " + std::to_string(net.node_count()) + " genes, " + std::to_string(net.edge_count()) +
                 " edges, " + std::to_string(terms.size()) + " functions");

        EigenSolverOptions eig;
        eig.max_iterations = ctx.config.eigen_max_iterations;
        eig.tolerance = ctx.config.eigen_tolerance;
        const auto affinity = build_affinity(net, labels.closed);
        const auto g_clusters = cluster_sweep(net, ctx.config.cluster_counts, ctx.config.seed, GraphTag::kG, eig);
        const auto f_clusters =
            cluster_sweep(affinity, ctx.config.cluster_counts, ctx.config.seed, GraphTag::kF, eig);
        auto g_out = staged.open("features_G.tsv");
        write_features(g_out, enrich(g_clusters, labels.filtered, labels.filtered_hierarchy, terms, GraphTag::kG));
        auto f_out = staged.open("features_F.tsv");
        write_features(f_out, enrich(f_clusters, labels.filtered, labels.filtered_hierarchy, terms, GraphTag::kF));

        auto report = staged.open("subhierarchies.tsv");
        try {
          write_subhierarchy_report(
              report, split_subhierarchies(labels.filtered_hierarchy, labels.filtered,
                                           static_cast<std::size_t>(ctx.config.min_functions_per_subhierarchy)));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kNoSubHierarchies) throw;
          write_subhierarchy_report(report, {});
          result.warnings.push_back(e.what());
        }
      });
}

/// Per sub-hierarchy and method: select-then-retrain with out-of-fold
/// predictions, then propagation. Writes predictions.tsv (all methods),
/// predictions_<method>.tsv, selection.tsv and selection_summary.tsv.
inline StageResult cmd_predict(const StageContext& ctx, const fs::path& features_g, const fs::path& features_f,
                               const fs::path& annotations, const fs::path& hierarchy, std::string_view method) {
  validate(ctx.config);
  const auto methods = parse_methods(method);
  return detail::run_stage(
      ctx, "predict-" + std::string(method),
      {{"features_G", features_g}, {"features_F", features_f}, {"annotations", annotations}, {"hierarchy", hierarchy}},
      std::string(method), [&](detail::StagedOutputs& staged, StageResult& result) {
        const auto g = read_features(features_g);
        const auto f = read_features(features_f);
        detail::check_feature_pair(g, f);
        const auto genes = SymbolTable::from_names(g.genes);
        const auto labels = detail::load_labels(annotations, hierarchy, genes, ctx.config, ctx);
        const auto subs = split_subhierarchies(labels.filtered_hierarchy, labels.filtered,
                                               static_cast<std::size_t>(ctx.config.min_functions_per_subhierarchy));

        std::vector<std::pair<std::string, PredictionTable>> all;
        std::map<std::string, std::vector<std::pair<std::string, PredictionTable>>> by_method;
        auto selection = staged.open("selection.tsv");
        selection << "sub_hierarchy_root\tmethod\tunit\tfold\tcolumn\timportance\tselected\n";
        auto summary = staged.open("selection_summary.tsv");
        summary << "root\tmethod\ttotal_features\tfiltered_features\tG_features\tF_features\n";

        for (const auto& sh : subs) {
          const auto x = detail::subhierarchy_features(sh, &g, &f, genes);
          const auto y = membership_labels(sh, labels.filtered);
          const auto folds = detail::folds_for(sh, y, ctx.config);
          const auto options = detail::train_options(ctx.config, sh);
          for (auto kind : methods) {
            const std::string name(to_string(kind));
            ctx.note("predict: " + sh.root_name() + " " + name);
            TrainLog log;
            auto table = propagate(train_strategy(plan(kind, sh), sh, x, y, folds, options, &log), sh);
            for (auto& w : log.warnings) result.warnings.push_back(sh.root_name() + ": " + w);

            std::set<std::string> kept;
            for (const auto& s : log.selections) {
              selection << sh.root_name() << '\t' << name << '\t' << s.unit << '\t' << s.fold << '\t' << s.column
                        << '\t' << format_double(s.importance) << '\t' << (s.selected ? 1 : 0) << '\n';
              if (s.selected) kept.insert(s.column);
            }
            std::size_t kept_g = 0;
            for (const auto& c : kept) kept_g += FeatureDescriptor::parse(c).graph == GraphTag::kG;
            summary << sh.root_name() << '\t' << name << '\t' << log.candidate_columns << '\t' << kept.size()
                    << '\t' << kept_g << '\t' << kept.size() - kept_g << '\n';
            all.emplace_back(name, table);
            by_method[name].emplace_back(name, std::move(table));
          }
        }
        auto combined = staged.open("predictions.tsv");
        detail::write_predictions(combined, all);
        for (const auto& [name, rows] : by_method) {
          auto out = staged.open("predictions_" + name + ".tsv");
          detail::write_predictions(out, rows);
        }
      });
}

/// Micro, macro and frequency-weighted AUPRC per (sub-hierarchy, method).
/// Writes metrics.tsv, per_function.tsv and curves.tsv.
inline StageResult cmd_evaluate(const StageContext& ctx, const fs::path& predictions, const fs::path& annotations,
                                const fs::path& hierarchy) {
  return detail::run_stage(
      ctx, "evaluate", {{"predictions", predictions}, {"annotations", annotations}, {"hierarchy", hierarchy}}, "",
      [&](detail::StagedOutputs& staged, StageResult& result) {
        const auto set = read_predictions_text(detail::read_file(predictions));
        const auto h = Hierarchy::from_edges(parse_hierarchy(hierarchy));
        const auto records = parse_annotations(annotations);
        std::vector<std::string> names;
        for (const auto& r : records) names.push_back(r.gene);
        for (const auto& [_, table] : set.tables) names.insert(names.end(), table.genes.begin(), table.genes.end());
        std::size_t dropped = 0;
        const auto ann =
            detail::closed_annotations(records, SymbolTable::from_names(names), h, ctx.config, &dropped);

        auto metrics = staged.open("metrics.tsv");
        metrics << "root\tmethod\tmetric\tvalue\n";
        auto per_function = staged.open("per_function.tsv");
        per_function << "root\tmethod\tterm\tauprc\tweight\n";
        auto curves = staged.open("curves.tsv");
        curves << "sub_hierarchy_root\tmethod\tcurve\tthreshold\tprecision\trecall\n";
        auto dump_curve = [&](const std::string& root, const std::string& method, const std::string& curve,
                              const PRCurve& c) {
          for (std::size_t i = 0; i < c.size(); ++i)
            curves << root << '\t' << method << '\t' << curve << '\t' << format_double(c.thresholds[i]) << '\t'
                   << format_double(c.precision[i]) << '\t' << format_double(c.recall[i]) << '\n';
        };

        for (const auto& [method, table] : set.tables) {
          const auto truth = truth_for(table, ann, h);
          const auto report = evaluate(table, truth);
          for (const auto& term : report.skipped)
            result.warnings.push_back(table.root + "/" + method + ": " + term + " has no positives; skipped");
          metrics << table.root << '\t' << method << "\tmicro\t" << format_double(report.micro_auprc) << '\n'
                  << table.root << '\t' << method << "\tmacro\t" << format_double(report.macro_auprc) << '\n'
                  << table.root << '\t' << method << "\tmacro_weighted\t"
                  << format_double(report.weighted_macro_auprc) << '\n';
          dump_curve(table.root, method, "ALL", micro_curve(table, truth));
          for (std::size_t t = 1; t < table.terms.size(); ++t) {
            auto it = report.per_function_auprc.find(table.terms[t]);
            if (it == report.per_function_auprc.end()) continue;
            per_function << table.root << '\t' << method << '\t' << table.terms[t] << '\t'
                         << format_double(it->second) << '\t' << format_double(report.weights.at(table.terms[t]))
                         << '\n';
            dump_curve(table.root, method, table.terms[t], function_curve(table, truth, t));
          }
        }
      });
}

/// Global strategy trained on J_G only, J_F only and both. Writes
/// ablation.tsv with three rows per sub-hierarchy.
inline StageResult cmd_ablate(const StageContext& ctx, const fs::path& features_g, const fs::path& features_f,
                              const fs::path& annotations, const fs::path& hierarchy) {
  validate(ctx.config);
  return detail::run_stage(
      ctx, "ablate",
      {{"features_G", features_g}, {"features_F", features_f}, {"annotations", annotations}, {"hierarchy", hierarchy}},
      "", [&](detail::StagedOutputs& staged, StageResult& result) {
        const auto g = read_features(features_g);
        const auto f = read_features(features_f);
        detail::check_feature_pair(g, f);
        const auto genes = SymbolTable::from_names(g.genes);
        const auto labels = detail::load_labels(annotations, hierarchy, genes, ctx.config, ctx);
        const auto subs = split_subhierarchies(labels.filtered_hierarchy, labels.filtered,
                                               static_cast<std::size_t>(ctx.config.min_functions_per_subhierarchy));
        auto out = staged.open("ablation.tsv");
        out << "root\tvariant\tn_columns\tmicro\tmacro\tmacro_weighted\n";
        const std::pair<const char*, std::pair<const FeatureMatrix*, const FeatureMatrix*>> variants[] = {
            {"G", {&g, nullptr}}, {"F", {nullptr, &f}}, {"G+F", {&g, &f}}};
        for (const auto& sh : subs) {
          const auto y = membership_labels(sh, labels.filtered);
          const auto folds = detail::folds_for(sh, y, ctx.config);
          const auto options = detail::train_options(ctx.config, sh);
          for (const auto& [name, sources] : variants) {
            ctx.note(std::string("ablate: ") + sh.root_name() + " " + name);
            const auto x = detail::subhierarchy_features(sh, sources.first, sources.second, genes);
            TrainLog log;
            const auto table = propagate(train_strategy(plan(StrategyKind::kGlobal, sh), sh, x, y, folds, options, &log), sh);
            for (auto& w : log.warnings) result.warnings.push_back(sh.root_name() + " " + name + ": " + w);
            const auto report = evaluate(table, y);
            out << sh.root_name() << '\t' << name << '\t' << x.cols() << '\t' << format_double(report.micro_auprc)
                << '\t' << format_double(report.macro_auprc) << '\t' << format_double(report.weighted_macro_auprc)
                << '\n';
          }
        }
      });
}

struct RunAllOptions {
  std::string method = "all";
  bool ablate = true;
};

/// features -> predict -> evaluate (-> ablate) into one output directory.
inline std::vector<StageResult> cmd_run_all(const StageContext& ctx, const fs::path& edges,
                                            const fs::path& annotations, const fs::path& hierarchy,
                                            const RunAllOptions& options = {}) {
  std::vector<StageResult> results;
  results.push_back(cmd_features(ctx, edges, annotations, hierarchy));
  const auto g = ctx.out_dir / "features_G.tsv";
  const auto f = ctx.out_dir / "features_F.tsv";
  results.push_back(cmd_predict(ctx, g, f, annotations, hierarchy, options.method));
  results.push_back(cmd_evaluate(ctx, ctx.out_dir / "predictions.tsv", annotations, hierarchy));
  if (options.ablate) results.push_back(cmd_ablate(ctx, g, f, annotations, hierarchy));
  return results;
}

/// Parses every input and checks closure; returns a short summary.
inline std::string cmd_validate(const fs::path& edges, const fs::path& annotations, const fs::path& hierarchy,
                                const RunConfig& config) {
  validate(config);
  const auto net = Network::from_edges(parse_edges(edges));
  const auto h = Hierarchy::from_edges(parse_hierarchy(hierarchy));
  std::size_t dropped = 0;
  const auto ann = detail::closed_annotations(parse_annotations(annotations), net.genes(), h, config, &dropped);
  const int largest = *std::max_element(config.cluster_counts.begin(), config.cluster_counts.end());
  if (static_cast<std::size_t>(largest) >= net.node_count())
    throw Error(ErrorCode::kInvalidValue, "cluster count " + std::to_string(largest) +
                                              " is not below the gene count " + std::to_string(net.node_count()));
  std::ostringstream out;
  out << "genes\t" << net.node_count() << "\nedges\t" << net.edge_count() << "\nterms\t" << h.size()
      << "\nannotation_pairs\t" << ann.pair_count() << "\ndropped_annotations\t" << dropped << '\n';
  return out.str();
}

}  // namespace gcnhmc

#endif  // GCNHMC_PIPELINE_HPP
