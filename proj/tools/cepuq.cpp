// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

// cepuq: command-line front end for the batch pipeline.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "cepuq/error.hpp"
#include "cepuq/pipeline.hpp"

namespace {

using namespace cepuq;

struct SharedFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> generator, task, quantile_rule, averaging;
  std::optional<std::size_t> n, k, n_trees, max_depth, sobol_n;
  std::optional<double> alpha, beta, sobol_threshold, test_fraction;
  bool knn_scaling = false;
};

void add_shared(CLI::App* app, SharedFlags& f) {
  app->add_option("--config", f.config, "run configuration JSON");
  app->add_option("--seed", f.seed, "master seed");
  app->add_option("--generator", f.generator, "traffic | fire")->check(CLI::IsMember({"traffic", "fire"}));
  app->add_option("--task", f.task, "binary | multilevel | regression")
      ->check(CLI::IsMember({"binary", "multilevel", "regression"}));
  app->add_option("--n", f.n, "rows to generate");
  app->add_option("--alpha", f.alpha, "miscoverage level");
  app->add_option("--quantile-rule", f.quantile_rule, "paper | n-plus-1")
      ->check(CLI::IsMember({"paper", "n-plus-1"}));
  app->add_option("--beta", f.beta, "normalizer offset");
  app->add_option("--k", f.k, "neighbours for the difficulty model");
  app->add_flag("--knn-scaling", f.knn_scaling, "z-score features before kNN");
  app->add_option("--n-trees", f.n_trees, "forest size");
  app->add_option("--max-depth", f.max_depth, "tree depth limit");
  app->add_option("--sobol-n", f.sobol_n, "Saltelli base sample size");
  app->add_option("--sobol-threshold", f.sobol_threshold, "total-index cut-off");
  app->add_option("--test-fraction", f.test_fraction, "share of rows held out for testing");
  app->add_option("--averaging", f.averaging, "micro | macro")->check(CLI::IsMember({"micro", "macro"}));
}

RunConfig build_config(const SharedFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  if (f.seed) c.seed = *f.seed;
  if (f.generator) c.data.generator = *f.generator;
  if (f.task) c.task = *f.task;
  if (f.n) c.data.n = *f.n;
  if (f.alpha) c.alpha = *f.alpha;
  if (f.quantile_rule) c.quantile_rule = quantile_rule_from_string(*f.quantile_rule);
  if (f.beta) c.beta = *f.beta;
  if (f.k) c.k = *f.k;
  if (f.knn_scaling) c.knn_scaling = true;
  if (f.n_trees) c.forest.n_trees = *f.n_trees;
  if (f.max_depth) c.forest.max_depth = *f.max_depth;
  if (f.sobol_n) c.sobol.N = *f.sobol_n;
  if (f.sobol_threshold) c.sobol.threshold = *f.sobol_threshold;
  if (f.test_fraction) c.test_fraction = *f.test_fraction;
  if (f.averaging) c.averaging = *f.averaging == "macro" ? Averaging::macro : Averaging::micro;
  c.validate();
  return c;
}

std::optional<ColumnSchema> read_schema(const std::string& path) {
  if (path.empty()) return std::nullopt;
  try {
    return schema_from_json(json::parse(read_text_file(path)));
  } catch (const json::exception& e) {
    throw UsageError("InvalidSchema", path + ": " + e.what());
  }
}

void require_same(const std::string& expected, const std::optional<std::string>& actual,
                  const std::string& what) {
  if (actual && *actual != expected)
    throw ModelError("FingerprintMismatch", what + " was produced by config " + *actual +
                                                ", current config is " + expected);
}

// Loads a dataset written by `generate` and checks it belongs to `cfg`.
Dataset load_for(const RunConfig& cfg, const std::string& path) {
  auto loaded = pipeline::load_dataset(path, cfg.data.schema);
  require_same(config_fingerprint(cfg), loaded.config_fingerprint, path);
  pipeline::check_task(cfg, loaded.data);
  return std::move(loaded.data);
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::usage: return 2;
    case ErrorCategory::data: return 3;
    case ErrorCategory::model: return 4;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware event detection pipeline"};
  app.require_subcommand(1);
  SharedFlags flags;

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  std::string gen_out;
  add_shared(gen, flags);
  gen->add_option("--out", gen_out, "output CSV")->required();

  auto* sob = app.add_subcommand("sobol", "screen features with Sobol indices");
  std::string sob_data, sob_out, sob_tsv;
  add_shared(sob, flags);
  sob->add_option("--data", sob_data, "dataset CSV")->required();
  sob->add_option("--out", sob_out, "report JSON")->required();
  sob->add_option("--tsv", sob_tsv, "also write a TSV table");

  auto* tr = app.add_subcommand("train", "fit a model");
  std::string tr_data, tr_sobol, tr_kind = "ml_cp", tr_out, tr_test;
  add_shared(tr, flags);
  tr->add_option("--data", tr_data, "dataset CSV")->required();
  tr->add_option("--sobol", tr_sobol, "Sobol report (ml_cp only; computed when absent)");
  tr->add_option("--kind", tr_kind, "ml_cp | npm | ipm")->check(CLI::IsMember({"ml_cp", "npm", "ipm"}));
  tr->add_option("--out", tr_out, "model JSON")->required();
  tr->add_option("--test-out", tr_test, "write the held-out test partition here");

  auto* pr = app.add_subcommand("predict", "apply a model to a dataset");
  std::string pr_model, pr_data, pr_schema, pr_out;
  pr->add_option("--model", pr_model, "model JSON")->required();
  pr->add_option("--data", pr_data, "dataset CSV")->required();
  pr->add_option("--schema", pr_schema, "schema JSON (default: the CSV sidecar)");
  pr->add_option("--out", pr_out, "predictions CSV (default: stdout)");

  auto* ev = app.add_subcommand("evaluate", "score predictions against truth");
  std::string ev_pred, ev_truth, ev_schema, ev_out, ev_avg = "micro";
  bool ev_compare = false;
  ev->add_option("--predictions", ev_pred, "predictions CSV")->required();
  ev->add_option("--truth", ev_truth, "dataset CSV with targets")->required();
  ev->add_option("--schema", ev_schema, "schema JSON (default: the CSV sidecar)");
  ev->add_option("--averaging", ev_avg, "micro | macro")->check(CLI::IsMember({"micro", "macro"}));
  ev->add_flag("--compare", ev_compare, "attach the published reference figures");
  ev->add_option("--out", ev_out, "metrics JSON (default: stdout)");

  auto* run = app.add_subcommand("run", "run every stage into one directory");
  std::string run_dir;
  add_shared(run, flags);
  run->add_option("--out-dir", run_dir, "output directory (default: $CEPUQ_OUTPUT_ROOT/run-<fingerprint>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      const RunConfig cfg = build_config(flags);
      if (cfg.data.path) throw UsageError("InvalidConfig", "generate does not read data.path");
      const Dataset d = pipeline::acquire_dataset(cfg);
      pipeline::save_dataset(gen_out, d, config_fingerprint(cfg));
    } else if (*sob) {
      const RunConfig cfg = build_config(flags);
      const auto parts = pipeline::split(cfg, load_for(cfg, sob_data));
      const auto report = pipeline::run_sobol(cfg, parts);
      write_text_file(sob_out, pipeline::to_json(report).dump(2) + "\n");
      if (!sob_tsv.empty()) write_text_file(sob_tsv, pipeline::sobol_tsv(report));
    } else if (*tr) {
      const RunConfig cfg = build_config(flags);
      const auto parts = pipeline::split(cfg, load_for(cfg, tr_data));
      const ModelKind kind = model_kind_from_string(tr_kind);
      ModelDocument doc;
      if (kind == ModelKind::ml_cp) {
        pipeline::SobolReport report;
        if (tr_sobol.empty()) {
          report = pipeline::run_sobol(cfg, parts);
        } else {
          json j;
          try {
            j = json::parse(read_text_file(tr_sobol));
          } catch (const json::parse_error& e) {
            throw ModelError("InvalidJson", tr_sobol + ": " + e.what());
          }
          report = pipeline::sobol_report_from_json(j);
          require_same(config_fingerprint(cfg), report.config_fingerprint, tr_sobol);
          if (report.feature_names != parts.train.schema.feature_names)
            throw ModelError("SchemaMismatch", "Sobol report features differ from the dataset");
        }
        doc = pipeline::train_ml_cp(cfg, parts, report.selected);
      } else {
        doc = pipeline::train_baseline(cfg, parts, kind);
      }
      write_text_file(tr_out, to_json(doc).dump() + "\n");
      if (!tr_test.empty()) pipeline::save_dataset(tr_test, parts.test, config_fingerprint(cfg));
    } else if (*pr) {
      json j;
      try {
        j = json::parse(read_text_file(pr_model));
      } catch (const json::parse_error& e) {
        throw ModelError("InvalidJson", pr_model + ": " + e.what());
      }
      const ModelDocument doc = model_document_from_json(j);
      auto loaded = pipeline::load_dataset(pr_data, read_schema(pr_schema));
      require_same(doc.config_fingerprint, loaded.config_fingerprint, pr_data);
      emit(pr_out, pipeline::to_csv(pipeline::predict(doc, loaded.data)));
    } else if (*ev) {
      const auto preds = pipeline::load_predictions(ev_pred);
      auto loaded = pipeline::load_dataset(ev_truth, read_schema(ev_schema));
      require_same(preds.config_fingerprint, loaded.config_fingerprint, ev_truth);
      const json doc = pipeline::evaluate(preds, loaded.data,
                                          ev_avg == "macro" ? Averaging::macro : Averaging::micro,
                                          ev_compare);
      emit(ev_out, doc.dump(2) + "\n");
    } else if (*run) {
      RunConfig cfg = build_config(flags);
      std::string dir = run_dir;
      if (dir.empty() && cfg.output_dir) dir = *cfg.output_dir;
      if (dir.empty()) {
        const char* root = std::getenv("CEPUQ_OUTPUT_ROOT");
        dir = std::string(root && *root ? root : "runs") + "/run-" + config_fingerprint(cfg);
      }
      const json summary = pipeline::run_experiment(cfg, dir);
      std::cout << pipeline::render_summary(summary) << "output: " << dir << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "cepuq: error [" << e.code() << "]: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "cepuq: error [Io]: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
