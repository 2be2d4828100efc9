// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cepuq/dataset.hpp"
#include "cepuq/matrix.hpp"

namespace cepuq {

// Gaussian reference models: NPM uses unit error stds, IPM uses stds derived
// from sensor spread. Both are reproduced as published, without improvements.

/// 0.1 x per-feature sample standard deviation. Throws DataError("ZeroStd")
/// for a constant feature.
std::vector<double> derive_ipm_stds(const Dataset& train);
std::vector<double> npm_stds(std::size_t n_features);

/// Per-class feature means scored by a sum of independent normal log-pdfs with fixed stds.
class GaussianClassBaseline {
 public:
  GaussianClassBaseline() = default;
  GaussianClassBaseline(Matrix means, std::vector<double> stds);

  /// Row c holds sum_f log N(x_f; means[c, f], stds[f]).
  std::vector<double> log_likelihoods(std::span<const double> x) const;
  /// Argmax of log_likelihoods(); ties go to the lowest class.
  int predict(std::span<const double> x) const;

  const Matrix& means() const noexcept { return means_; }
  const std::vector<double>& stds() const noexcept { return stds_; }

 private:
  Matrix means_;
  std::vector<double> stds_;
};

/// Throws DataError("MissingClass") if some class in [0, n_classes) has no rows.
GaussianClassBaseline fit_gaussian_classifier(const Matrix& X, std::span<const double> y,
                                              std::size_t n_classes, std::vector<double> stds);

inline int predict_gaussian_class(const GaussianClassBaseline& m, std::span<const double> x) {
  return m.predict(x);
}

/// means[i] = mean_j(y_j * X[j, i]); prediction is the precision-weighted
/// ratio sum(x * means * w) / sum(x * w) with w = 1 / std^2.
class WeightedMeanRegressor {
 public:
  WeightedMeanRegressor() = default;
  WeightedMeanRegressor(std::vector<double> means, std::vector<double> feature_stds);

  /// Throws DataError("ZeroDenominator") when sum(x * w) == 0.
  double predict(std::span<const double> x) const;

  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& feature_stds() const noexcept { return feature_stds_; }

 private:
  std::vector<double> means_;
  std::vector<double> feature_stds_;
};

WeightedMeanRegressor fit_weighted_regressor(const Matrix& X, std::span<const double> y,
                                             std::vector<double> feature_stds);

inline double predict_weighted_regression(const WeightedMeanRegressor& m,
                                          std::span<const double> x) {
  return m.predict(x);
}

}  // namespace cepuq
