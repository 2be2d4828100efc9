// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "cepuq/conformal.hpp"

namespace cepuq {

// Turns conformal intervals into task outputs. Classification is done by
// regressing on the numeric label and reading the interval midpoint.

struct LabeledPrediction {
  int label = 0;
  double confidence = 0.0;  // percent
};

struct RegressionPrediction {
  double value = 0.0;
  double width = 0.0;
};

/// Strictly ascending class boundaries; label i covers (t[i-1], t[i]].
class ClassThresholds {
 public:
  explicit ClassThresholds(std::vector<double> bounds);
  /// Midpoints between consecutive integer labels: 0.5, 1.5, ..., n - 1.5.
  static ClassThresholds midpoints(std::size_t n_classes);

  const std::vector<double>& bounds() const noexcept { return bounds_; }
  std::size_t n_classes() const noexcept { return bounds_.size() + 1; }

 private:
  std::vector<double> bounds_;
};

double interval_mean(const PredictionInterval& p) noexcept;

/// Heuristic confidence (percent) from the fractional part of `value`:
/// 100 below 0.1, (1 - frac) * 100 up to 0.5, frac * 100 above.
/// The fractional part follows floor semantics, so negative inputs wrap into [0, 1).
double confidence_of(double value) noexcept;

/// Label 1 iff mean > 0.5.
LabeledPrediction binary_decision(double mean) noexcept;
/// Smallest i with mean <= t[i], else |t|.
LabeledPrediction multiclass_decision(double mean, const ClassThresholds& t) noexcept;
RegressionPrediction regression_decision(const PredictionInterval& p) noexcept;

}  // namespace cepuq
