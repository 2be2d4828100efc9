// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/baselines.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cepuq/error.hpp"

namespace cepuq {

namespace {

void check_stds(std::span<const double> stds) {
  for (double s : stds)
    if (!(s > 0.0) || !std::isfinite(s))
      throw UsageError("InvalidStd", "baseline standard deviations must be positive");
}

}  // namespace

std::vector<double> derive_ipm_stds(const Dataset& train) {
  const std::size_t n = train.size();
  if (n < 2) throw DataError("TooFewRows", "IPM stds need at least 2 rows");
  std::vector<double> out(train.n_features());
  for (std::size_t f = 0; f < out.size(); ++f) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += train.X(r, f);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (train.X(r, f) - mean) * (train.X(r, f) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0))
      throw DataError("ZeroStd", "feature '" + train.schema.feature_names[f] + "' is constant");
    out[f] = 0.1 * sd;
  }
  return out;
}

std::vector<double> npm_stds(std::size_t n_features) { return std::vector<double>(n_features, 1.0); }

GaussianClassBaseline::GaussianClassBaseline(Matrix means, std::vector<double> stds)
    : means_(std::move(means)), stds_(std::move(stds)) {
  check_stds(stds_);
  if (means_.cols() != stds_.size()) throw DimensionMismatch(stds_.size(), means_.cols());
}

std::vector<double> GaussianClassBaseline::log_likelihoods(std::span<const double> x) const {
  if (x.size() != stds_.size()) throw DimensionMismatch(stds_.size(), x.size());
  std::vector<double> ll(means_.rows(), 0.0);
  for (std::size_t c = 0; c < means_.rows(); ++c) {
    double acc = 0.0;
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double z = (x[f] - means_(c, f)) / stds_[f];
      acc += -0.5 * std::log(2.0 * std::numbers::pi * stds_[f] * stds_[f]) - 0.5 * z * z;
    }
    ll[c] = acc;
  }
  return ll;
}

int GaussianClassBaseline::predict(std::span<const double> x) const {
  const auto ll = log_likelihoods(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < ll.size(); ++c)
    if (ll[c] > ll[best]) best = c;
  return static_cast<int>(best);
}

GaussianClassBaseline fit_gaussian_classifier(const Matrix& X, std::span<const double> y,
                                              std::size_t n_classes, std::vector<double> stds) {
  if (X.rows() != y.size()) throw DataError("ShapeMismatch", "X rows != y length");
  Matrix means(n_classes, X.cols());
  std::vector<std::size_t> counts(n_classes, 0);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    if (c >= n_classes) throw DataError("InvalidLabel", "label outside class set");
    ++counts[c];
    for (std::size_t f = 0; f < X.cols(); ++f) means(c, f) += X(r, f);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] == 0)
      throw DataError("MissingClass", "class " + std::to_string(c) + " has no training rows");
    for (std::size_t f = 0; f < X.cols(); ++f) means(c, f) /= static_cast<double>(counts[c]);
  }
  return GaussianClassBaseline(std::move(means), std::move(stds));
}

WeightedMeanRegressor::WeightedMeanRegressor(std::vector<double> means,
                                             std::vector<double> feature_stds)
    : means_(std::move(means)), feature_stds_(std::move(feature_stds)) {
  check_stds(feature_stds_);
  if (means_.size() != feature_stds_.size())
    throw DimensionMismatch(feature_stds_.size(), means_.size());
}

double WeightedMeanRegressor::predict(std::span<const double> x) const {
  if (x.size() != means_.size()) throw DimensionMismatch(means_.size(), x.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (feature_stds_[i] * feature_stds_[i]);
    num += x[i] * means_[i] * w;
    den += x[i] * w;
  }
  if (den == 0.0) throw DataError("ZeroDenominator", "sum(x * w) is zero");
  return num / den;
}

WeightedMeanRegressor fit_weighted_regressor(const Matrix& X, std::span<const double> y,
                                             std::vector<double> feature_stds) {
  if (X.rows() == 0) throw DataError("EmptyTrainingSet", "no training rows");
  if (X.rows() != y.size()) throw DataError("ShapeMismatch", "X rows != y length");
  std::vector<double> means(X.cols(), 0.0);
  for (std::size_t i = 0; i < X.cols(); ++i) {
    for (std::size_t j = 0; j < X.rows(); ++j) means[i] += y[j] * X(j, i);
    means[i] /= static_cast<double>(X.rows());
  }
  return WeightedMeanRegressor(std::move(means), std::move(feature_stds));
}

}  // namespace cepuq
