// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cepuq/dataset.hpp"
#include "cepuq/forest.hpp"
#include "cepuq/knn.hpp"

namespace cepuq {

/// Scales residuals by an estimate of local difficulty:
/// sigma(x) = exp(knn(x)) + beta, where the kNN regresses ln(|residual| + beta).
struct Normalizer {
  KnnModel difficulty_model;
  double beta = 0.01;

  double sigma(std::span<const double> x) const;
  bool operator==(const Normalizer&) const = default;
};

/// Ascending nonconformity scores of the calibration set.
class CalibrationTable {
 public:
  CalibrationTable() = default;
  /// Sorts `scores`; throws on empty input or negative/non-finite scores.
  explicit CalibrationTable(std::vector<double> scores);

  const std::vector<double>& scores() const noexcept { return scores_; }
  std::size_t size() const noexcept { return scores_.size(); }
  bool operator==(const CalibrationTable&) const = default;

 private:
  std::vector<double> scores_;
};

enum class QuantileRule {
  /// 1-based index ceil(n * (1 - alpha)).
  paper_n,
  /// 1-based index ceil((n + 1) * (1 - alpha)); exact finite-sample validity.
  finite_sample_n_plus_1,
};

std::string to_string(QuantileRule rule);
/// Accepts "paper" / "paper_n" and "n-plus-1" / "finite_sample_n_plus_1".
QuantileRule quantile_rule_from_string(const std::string& text);

struct PredictionInterval {
  double lo = 0.0;
  double hi = 0.0;
  double alpha = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

/// 1-based rank of the cutoff score, clipped to [1, n].
std::size_t quantile_index(std::size_t n, double alpha, QuantileRule rule);
double quantile_cutoff(const CalibrationTable& t, double alpha, QuantileRule rule);

/// Normalized inductive conformal regressor over a regression forest.
class IcpModel {
 public:
  IcpModel() = default;
  IcpModel(Forest underlying, Normalizer normalizer, QuantileRule rule,
           std::optional<CalibrationTable> calibration = std::nullopt);

  double point(std::span<const double> x) const { return underlying_.predict(x); }
  double sigma(std::span<const double> x) const { return normalizer_.sigma(x); }
  /// |y - forest(x)| / sigma(x)
  double nonconformity(std::span<const double> x, double y) const;

  /// Throws NotCalibrated before calibrate_icp().
  PredictionInterval predict_interval(std::span<const double> x, double alpha) const;

  bool calibrated() const noexcept { return calibration_.has_value(); }
  const Forest& underlying() const noexcept { return underlying_; }
  const Normalizer& normalizer() const noexcept { return normalizer_; }
  const std::optional<CalibrationTable>& calibration() const noexcept { return calibration_; }
  QuantileRule quantile_rule() const noexcept { return rule_; }
  std::size_t n_features() const noexcept { return underlying_.n_features(); }

  void set_calibration(CalibrationTable t) { calibration_ = std::move(t); }

 private:
  Forest underlying_;
  Normalizer normalizer_;
  QuantileRule rule_ = QuantileRule::paper_n;
  std::optional<CalibrationTable> calibration_;
};

struct IcpOptions {
  ForestParams forest;
  std::size_t k = 5;
  double beta = 0.01;
  QuantileRule rule = QuantileRule::paper_n;
  bool scale_knn = false;
};

/// Fits the forest on `train` and the difficulty kNN on the forest's
/// training-set log-residuals. The result is not yet calibrated.
IcpModel fit_icp(const Dataset& train, const IcpOptions& options);

/// Scores `cal` with the already-fitted forest and normalizer; never refits.
IcpModel calibrate_icp(IcpModel m, const Dataset& cal);

inline PredictionInterval predict_interval(const IcpModel& m, std::span<const double> x,
                                           double alpha) {
  return m.predict_interval(x, alpha);
}

}  // namespace cepuq
