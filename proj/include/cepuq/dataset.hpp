// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cepuq/matrix.hpp"

namespace cepuq {

enum class TargetKind { binary, multiclass, regression };

std::string to_string(TargetKind kind);
TargetKind target_kind_from_string(const std::string& text);

/// Column layout of a labeled feature table.
struct ColumnSchema {
  std::vector<std::string> feature_names;
  std::string target_name;
  TargetKind target_kind = TargetKind::regression;
  /// Only meaningful for multiclass; binary always has two classes.
  std::size_t n_classes = 0;
  std::optional<std::string> timestamp_column;
  std::optional<std::string> sensor_id_column;

  /// Throws UsageError on duplicate/empty features, target among features, or
  /// a multiclass schema with fewer than two classes.
  void validate() const;

  bool is_classification() const noexcept { return target_kind != TargetKind::regression; }
  /// 2 for binary, n_classes for multiclass, 0 for regression.
  std::size_t class_count() const noexcept;
  std::optional<std::size_t> feature_index(const std::string& name) const;

  bool operator==(const ColumnSchema&) const = default;
};

/// Feature matrix + target vector. y holds class indices for classification.
struct Dataset {
  ColumnSchema schema;
  Matrix X;
  std::vector<double> y;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t n_features() const noexcept { return X.cols(); }

  /// Throws DataError when shapes disagree, a value is non-finite, or a label
  /// is outside the declared class set.
  void validate() const;

  Dataset subset_rows(const std::vector<std::size_t>& rows) const;
  /// Keeps only the listed feature columns, in the listed order.
  Dataset select_features(const std::vector<std::size_t>& features) const;
};

/// Reads a headered CSV. Columns are reordered to schema order; extra columns
/// are ignored. Lines starting with '#' are skipped.
Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema);
Dataset parse_csv(const std::string& text, const ColumnSchema& schema);

/// Header = features then target; reals printed with format_real.
std::string to_csv(const Dataset& d);
void write_csv(const std::filesystem::path& path, const Dataset& d);

/// Shortest text that parses back to `v` with at most 17 significant digits.
std::string format_real(double v);

enum class CalibrationMode { none, even_split };

struct SplitSpec {
  double test_fraction = 1.0 / 3.0;
  CalibrationMode calibration_mode = CalibrationMode::even_split;
  std::uint64_t seed = 0;
};

struct SplitResult {
  Dataset train;
  std::optional<Dataset> calibrate;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> calibrate_rows;
  std::vector<std::size_t> test_rows;
};

/// test = round(n * f), calibrate = floor((n - test) / 2), train = remainder.
/// Rows are assigned from a seeded permutation: test first, then calibrate.
SplitResult split_three_way(const Dataset& d, const SplitSpec& spec);

enum class TrafficTask { binary, multilevel, regression };

std::string to_string(TrafficTask task);
TrafficTask traffic_task_from_string(const std::string& text);

/// Jam-length boundaries between congestion levels 1|2 and 2|3, in meters.
inline constexpr double kLightJamMaxMeters = 82.5;
inline constexpr double kModerateJamMaxMeters = 165.0;
inline constexpr double kMaxJamMeters = 250.0;

/// 0 = no jam, 1 = light (<= 82.5 m), 2 = moderate (<= 165 m), 3 = severe.
int congestion_level(double jam_length_m) noexcept;

ColumnSchema traffic_schema(TrafficTask task);
ColumnSchema fire_schema();

/// Synthetic lane-detector readings driven by a latent congestion intensity.
/// Features: speed (m/s), flow (counts), occupancy (%), halting duration (s).
Dataset generate_synthetic_traffic(std::size_t n, std::uint64_t seed, TrafficTask task);

/// Synthetic fire-detector readings: temperature (C), smoke (ppm), flame (0/1).
/// The label depends on temperature and smoke only.
Dataset generate_synthetic_fire(std::size_t n, std::uint64_t seed);

/// Ambient (no-fire) means of the fire generator.
inline constexpr double kAmbientTemperature = 25.0;
inline constexpr double kAmbientSmoke = 100.0;
/// Deterministic labeling rule of the fire generator (before label noise).
int fire_label(double temperature, double smoke) noexcept;

}  // namespace cepuq
