// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/decision.hpp"

#include <cmath>

#include "cepuq/error.hpp"

namespace cepuq {

ClassThresholds::ClassThresholds(std::vector<double> bounds) : bounds_(std::move(bounds)) {
  for (std::size_t i = 1; i < bounds_.size(); ++i)
    if (!(bounds_[i - 1] < bounds_[i]))
      throw UsageError("InvalidThresholds", "class thresholds must be strictly ascending");
}

ClassThresholds ClassThresholds::midpoints(std::size_t n_classes) {
  if (n_classes < 2) throw UsageError("InvalidThresholds", "need at least 2 classes");
  std::vector<double> b;
  for (std::size_t i = 0; i + 1 < n_classes; ++i) b.push_back(static_cast<double>(i) + 0.5);
  return ClassThresholds(std::move(b));
}

double interval_mean(const PredictionInterval& p) noexcept { return (p.lo + p.hi) / 2.0; }

double confidence_of(double value) noexcept {
  const double frac = value - std::floor(value);
  if (frac < 0.1) return 100.0;
  if (frac <= 0.5) return (1.0 - frac) * 100.0;
  return frac * 100.0;
}

LabeledPrediction binary_decision(double mean) noexcept {
  return {mean > 0.5 ? 1 : 0, confidence_of(mean)};
}

LabeledPrediction multiclass_decision(double mean, const ClassThresholds& t) noexcept {
  const auto& b = t.bounds();
  int label = static_cast<int>(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (mean <= b[i]) {
      label = static_cast<int>(i);
      break;
    }
  }
  return {label, confidence_of(mean)};
}

RegressionPrediction regression_decision(const PredictionInterval& p) noexcept {
  return {interval_mean(p), p.hi - p.lo};
}

}  // namespace cepuq
