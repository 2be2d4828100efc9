// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "cepuq/error.hpp"

namespace cepuq {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("InvalidAlpha", "alpha must lie in (0, 1)");
}

}  // namespace

double Normalizer::sigma(std::span<const double> x) const {
  return std::exp(difficulty_model.predict(x)) + beta;
}

CalibrationTable::CalibrationTable(std::vector<double> scores) : scores_(std::move(scores)) {
  if (scores_.empty()) throw DataError("EmptyCalibrationSet", "no calibration scores");
  for (double s : scores_)
    if (!(s >= 0.0) || !std::isfinite(s))
      throw DataError("InvalidScore", "calibration scores must be finite and >= 0");
  std::sort(scores_.begin(), scores_.end());
}

std::string to_string(QuantileRule rule) {
  return rule == QuantileRule::paper_n ? "paper" : "n-plus-1";
}

QuantileRule quantile_rule_from_string(const std::string& text) {
  if (text == "paper" || text == "paper_n") return QuantileRule::paper_n;
  if (text == "n-plus-1" || text == "finite_sample_n_plus_1")
    return QuantileRule::finite_sample_n_plus_1;
  throw UsageError("InvalidQuantileRule", "unknown quantile rule '" + text + "'");
}

std::size_t quantile_index(std::size_t n, double alpha, QuantileRule rule) {
  check_alpha(alpha);
  const double base = static_cast<double>(rule == QuantileRule::paper_n ? n : n + 1);
  // 1 - alpha is rarely exact in binary; absorb the representation error so
  // that e.g. 500 * (1 - 0.1) selects rank 450, not 451.
  const double rank = std::ceil(base * (1.0 - alpha) - 1e-9);
  return static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(n)));
}

double quantile_cutoff(const CalibrationTable& t, double alpha, QuantileRule rule) {
  return t.scores()[quantile_index(t.size(), alpha, rule) - 1];
}

IcpModel::IcpModel(Forest underlying, Normalizer normalizer, QuantileRule rule,
                   std::optional<CalibrationTable> calibration)
    : underlying_(std::move(underlying)),
      normalizer_(std::move(normalizer)),
      rule_(rule),
      calibration_(std::move(calibration)) {
  if (!(normalizer_.beta > 0.0)) throw UsageError("InvalidBeta", "beta must be > 0");
  if (normalizer_.difficulty_model.n_features() != underlying_.n_features())
    throw ModelError("SchemaMismatch", "normalizer and forest disagree on feature count");
}

double IcpModel::nonconformity(std::span<const double> x, double y) const {
  return std::abs(y - point(x)) / sigma(x);
}

PredictionInterval IcpModel::predict_interval(std::span<const double> x, double alpha) const {
  if (!calibration_) throw ModelError("NotCalibrated", "ICP model has not been calibrated");
  const double q = quantile_cutoff(*calibration_, alpha, rule_);
  const double centre = point(x);
  const double half = q * sigma(x);
  return {centre - half, centre + half, alpha};
}

IcpModel fit_icp(const Dataset& train, const IcpOptions& options) {
  if (train.size() == 0) throw DataError("EmptyTrainingSet", "empty training partition");
  if (!(options.beta > 0.0)) throw UsageError("InvalidBeta", "beta must be > 0");
  Forest forest = fit_forest(train.X, train.y, options.forest);

  std::vector<double> log_residual(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    log_residual[i] = std::log(std::abs(train.y[i] - forest.predict(train.X.row(i))) + options.beta);
  Normalizer normalizer{fit_knn(train.X, log_residual, options.k, options.scale_knn), options.beta};
  return IcpModel(std::move(forest), std::move(normalizer), options.rule);
}

IcpModel calibrate_icp(IcpModel m, const Dataset& cal) {
  if (cal.size() == 0) throw DataError("EmptyCalibrationSet", "empty calibration partition");
  if (cal.n_features() != m.n_features()) throw DimensionMismatch(m.n_features(), cal.n_features());
  std::vector<double> scores(cal.size());
  for (std::size_t i = 0; i < cal.size(); ++i) scores[i] = m.nonconformity(cal.X.row(i), cal.y[i]);
  m.set_calibration(CalibrationTable(std::move(scores)));
  return m;
}

}  // namespace cepuq
