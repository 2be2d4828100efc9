// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Batch workflow: generate -> sobol -> train -> predict -> evaluate, for the
// conformal model (ml_cp) and the two Gaussian baselines (npm, ipm).
//
// Every artifact carries the fingerprint of the configuration that produced
// it; a stage that consumes an artifact with a different fingerprint fails
// with ModelError("FingerprintMismatch").

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cepuq/dataset.hpp"
#include "cepuq/metrics.hpp"
#include "cepuq/model_io.hpp"
#include "cepuq/sobol.hpp"

namespace cepuq {

struct RunConfig {
  struct Data {
    std::string generator = "traffic";  // "traffic" or "fire"
    std::size_t n = 6000;
    /// Load this CSV instead of generating. Not part of the fingerprint.
    std::optional<std::string> path;
    std::optional<ColumnSchema> schema;
    bool operator==(const Data&) const = default;
  };
  struct Sobol {
    std::size_t N = 2048;
    double threshold = 0.05;
    bool operator==(const Sobol&) const = default;
  };
  /// Per-stage seeds; unset ones are derived from the master seed.
  struct Seeds {
    std::optional<std::uint64_t> data, split, forest, sobol;
    bool operator==(const Seeds&) const = default;
  };

  Data data;
  std::string task = "binary";  // binary | multilevel | regression
  double alpha = 0.03;
  QuantileRule quantile_rule = QuantileRule::paper_n;
  double test_fraction = 1.0 / 3.0;
  CalibrationMode calibration_mode = CalibrationMode::even_split;
  Sobol sobol;
  /// The seed field is ignored; see seeds.forest.
  ForestParams forest;
  std::size_t k = 5;
  bool knn_scaling = false;
  double beta = 0.01;
  Averaging averaging = Averaging::micro;
  std::optional<std::vector<double>> class_thresholds;
  std::uint64_t seed = 2024;
  Seeds seeds;
  /// Not part of the fingerprint.
  std::optional<std::string> output_dir;

  void validate() const;
  /// Copy with every per-stage seed filled in.
  RunConfig resolved() const;

  std::uint64_t data_seed() const;
  SplitSpec split_spec() const;
  ForestParams forest_params() const;
  std::uint64_t sobol_seed() const;
  TargetKind target_kind() const;
  /// Key into the reference results ("fire" for the fire generator, else the task).
  std::string reference_key() const;

  bool operator==(const RunConfig&) const = default;
};

json to_json(const RunConfig& c);
RunConfig run_config_from_json(const json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of `bytes`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
/// Fingerprint of the resolved config, excluding I/O locations.
std::string config_fingerprint(const RunConfig& c);
std::string dataset_fingerprint(const Dataset& d);

namespace pipeline {

/// A dataset plus whatever its sidecar (<csv>.meta.json) recorded.
struct LoadedDataset {
  Dataset data;
  std::optional<std::string> config_fingerprint;
};

/// Schema: `schema` if given, else the sidecar's. Throws UsageError if neither exists.
LoadedDataset load_dataset(const std::filesystem::path& csv,
                           const std::optional<ColumnSchema>& schema = std::nullopt);
/// Writes the CSV and its sidecar.
void save_dataset(const std::filesystem::path& csv, const Dataset& d,
                  const std::optional<std::string>& config_fp);

/// Generates from cfg.data, or loads cfg.data.path (checking any sidecar fingerprint).
Dataset acquire_dataset(const RunConfig& cfg);
/// Validates that the dataset's target matches the configured task.
void check_task(const RunConfig& cfg, const Dataset& d);
SplitResult split(const RunConfig& cfg, const Dataset& d);

struct SobolReport {
  std::vector<std::string> feature_names;
  InputRange ranges;
  SobolResult result;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  double threshold = 0.0;
  std::vector<std::size_t> selected;
  std::string config_fingerprint;
};

/// Fits a surrogate forest on the training partition and screens its inputs
/// with uniform sampling over the training ranges.
SobolReport run_sobol(const RunConfig& cfg, const SplitResult& split);
json to_json(const SobolReport& r);
SobolReport sobol_report_from_json(const json& j);
/// feature, s1, st (tab-separated, with header).
std::string sobol_tsv(const SobolReport& r);

/// Fits forest + normalizer on the training partition restricted to
/// `selected` features and calibrates on the calibration partition.
ModelDocument train_ml_cp(const RunConfig& cfg, const SplitResult& split,
                          const std::vector<std::size_t>& selected);
/// Fits NPM or IPM on every non-test row with all features.
ModelDocument train_baseline(const RunConfig& cfg, const SplitResult& split, ModelKind kind);

struct PredictionRow {
  std::size_t row_id = 0;
  double output = 0.0;               // label or value
  std::optional<double> auxiliary;   // confidence (%) or interval width
  std::optional<double> lo, hi;
};

struct PredictionTable {
  ModelKind kind = ModelKind::ml_cp;
  TargetKind target = TargetKind::regression;
  std::string config_fingerprint;
  /// {alpha, seed, split, reference_key} of the producing config.
  json run_info;
  std::vector<PredictionRow> rows;
};

/// Throws ModelError("SchemaMismatch") if the dataset lacks a model feature
/// or has a different target kind.
PredictionTable predict(const ModelDocument& model, const Dataset& data);
std::string to_csv(const PredictionTable& t);
PredictionTable parse_predictions(const std::string& text);
PredictionTable load_predictions(const std::filesystem::path& path);

/// Metrics document for one prediction table against its truth rows.
json evaluate(const PredictionTable& predictions, const Dataset& truth, Averaging averaging,
              bool compare);

/// Runs every stage into `out_dir` and returns the summary document.
json run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir);
/// Plain-text table rendered from a summary document.
std::string render_summary(const json& summary);

}  // namespace pipeline

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cepuq
