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

// Command-line front end. Exit status: 0 success, 1 validation or
// configuration error, 2 runtime or numeric failure.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "gcnhmc/gcnhmc.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool no_cache = false;
  bool quiet = false;
  std::string out = "out";
};

gcnhmc::RunConfig load(const Common& c) {
  gcnhmc::RunConfig config = c.config.empty() ? gcnhmc::RunConfig{} : gcnhmc::load_config(c.config);
  if (c.seed) config.seed = *c.seed;
  gcnhmc::validate(config);
  return config;
}

gcnhmc::StageContext context(const Common& c) {
  gcnhmc::StageContext ctx;
  ctx.out_dir = c.out;
  ctx.config = load(c);
  ctx.use_cache = !c.no_cache;
  ctx.log = c.quiet ? nullptr : &std::cerr;
  return ctx;
}

void report(const gcnhmc::StageResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& p : r.outputs) std::cout << p.string() << '\n';
}

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("--config", c.config, "key=value run configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "override the configured seed");
  cmd->add_option("--threads", c.threads, "worker cap (0 = all cores)");
  cmd->add_flag("--no-cache", c.no_cache, "always recompute");
  cmd->add_flag("-q,--quiet", c.quiet, "no progress messages");
  if (with_out) cmd->add_option("-o,--out", c.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gene function prediction from co-expression networks with hierarchical multi-label classifiers"};
  app.require_subcommand(1);
  Common common;
  std::string edges, annotations, hierarchy, method = "all", features_g, features_f, predictions;

  auto inputs = [&](CLI::App* cmd) {
    cmd->add_option("--edges", edges, "gene_a<TAB>gene_b<TAB>weight")->required()->check(CLI::ExistingFile);
    cmd->add_option("--annotations", annotations, "gene<TAB>term")->required()->check(CLI::ExistingFile);
    cmd->add_option("--hierarchy", hierarchy, "child<TAB>parent")->required()->check(CLI::ExistingFile);
  };
  auto labels = [&](CLI::App* cmd) {
    cmd->add_option("--annotations", annotations, "gene<TAB>term")->required()->check(CLI::ExistingFile);
    cmd->add_option("--hierarchy", hierarchy, "child<TAB>parent")->required()->check(CLI::ExistingFile);
  };
  auto feature_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--features-g", features_g, "J_G matrix (default <out>/features_G.tsv)");
    cmd->add_option("--features-f", features_f, "J_F matrix (default <out>/features_F.tsv)");
  };

  auto* validate = app.add_subcommand("validate", "check inputs and configuration");
  inputs(validate);
  add_common(validate, common, false);

  gcnhmc::SynthSpec spec;
  std::string shape = "chain", custom;
  auto* synth = app.add_subcommand("synth", "write a synthetic planted dataset");
  synth->add_option("--genes", spec.n_genes);
  synth->add_option("--blocks", spec.n_blocks);
  synth->add_option("--weight-min", spec.in_block_weight_min);
  synth->add_option("--weight-max", spec.in_block_weight_max);
  synth->add_option("--in-block-prob", spec.in_block_edge_prob);
  synth->add_option("--cross-block-prob", spec.cross_block_edge_prob);
  synth->add_option("--shape", shape, "chain | star | binary-tree | custom");
  synth->add_option("--custom-edges", custom, "child<TAB>parent tree for --shape custom")->check(CLI::ExistingFile);
  synth->add_option("--terms", spec.terms_per_hierarchy, "terms per hierarchy");
  synth->add_option("--hierarchies", spec.n_hierarchies);
  synth->add_option("--signal", spec.signal, "chance a parent block is kept by a child");
  synth->add_option("--noise", spec.noise, "leaf annotation flip rate");
  synth->add_option("--seed", spec.seed);
  synth->add_option("-o,--out", common.out, "output directory");

  auto* features = app.add_subcommand("features", "build J_G and J_F");
  inputs(features);
  add_common(features, common);

  auto* predict = app.add_subcommand("predict", "hierarchical out-of-fold predictions");
  feature_inputs(predict);
  labels(predict);
  predict->add_option("--method", method, "lcn | lcpn | lcl | global | all");
  add_common(predict, common);

  auto* evaluate = app.add_subcommand("evaluate", "PR-curve metrics of predictions");
  evaluate->add_option("--predictions", predictions, "predictions.tsv (default <out>/predictions.tsv)");
  labels(evaluate);
  add_common(evaluate, common);

  auto* ablate = app.add_subcommand("ablate", "global strategy on J_G, J_F and both");
  feature_inputs(ablate);
  labels(ablate);
  add_common(ablate, common);

  bool no_ablate = false;
  auto* run_all = app.add_subcommand("run-all", "features, predict, evaluate and ablate");
  inputs(run_all);
  run_all->add_option("--method", method, "lcn | lcpn | lcl | global | all");
  run_all->add_flag("--no-ablate", no_ablate, "skip the feature-source ablation");
  add_common(run_all, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : 1;
  }

  try {
    gcnhmc::thread_limit() = common.threads;
    const std::filesystem::path out = common.out;
    auto or_default = [&](const std::string& given, const char* name) {
      return given.empty() ? out / name : std::filesystem::path(given);
    };

    if (*validate) {
      std::cout << gcnhmc::cmd_validate(edges, annotations, hierarchy, load(common));
    } else if (*synth) {
      spec.shape = gcnhmc::parse_shape(shape);
      if (!custom.empty()) spec.custom_edges = gcnhmc::parse_hierarchy(custom);
      gcnhmc::write_dataset(gcnhmc::generate(spec), out);
      std::cout << out.string() << '\n';
    } else if (*features) {
      report(gcnhmc::cmd_features(context(common), edges, annotations, hierarchy));
    } else if (*predict) {
      report(gcnhmc::cmd_predict(context(common), or_default(features_g, "features_G.tsv"),
                                 or_default(features_f, "features_F.tsv"), annotations, hierarchy, method));
    } else if (*evaluate) {
      report(gcnhmc::cmd_evaluate(context(common), or_default(predictions, "predictions.tsv"), annotations,
                                  hierarchy));
    } else if (*ablate) {
      report(gcnhmc::cmd_ablate(context(common), or_default(features_g, "features_G.tsv"),
                                or_default(features_f, "features_F.tsv"), annotations, hierarchy));
    } else if (*run_all) {
      gcnhmc::RunAllOptions options;
      options.method = method;
      options.ablate = !no_ablate;
      for (const auto& r : gcnhmc::cmd_run_all(context(common), edges, annotations, hierarchy, options)) report(r);
    }
  } catch (const gcnhmc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return gcnhmc::is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
