// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cepuq/conformal.hpp"

namespace cepuq {

/// Binary confusion counts (class 1 is the positive class).
struct ConfusionCounts {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
  std::size_t total() const noexcept { return tp + fn + tn + fp; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// How multiclass sensitivity/specificity/precision are aggregated. Class 0 is
/// the background ("no event") class; one-vs-rest counts are taken for every
/// event class 1..K-1 and then pooled (micro) or averaged (macro). With K = 2
/// both reduce to the binary definitions.
enum class Averaging { micro, macro };

/// Undefined ratios (zero denominator) are std::nullopt, never NaN or 0.
struct MetricsReport {
  std::string task;
  std::optional<double> accuracy, sensitivity, specificity, precision, recall, f_measure;
  std::optional<ConfusionCounts> counts;
  std::optional<double> r2, mae, mse, medae;
  std::optional<double> coverage, mean_width;

  /// Copies every field that is set in `other` into this report.
  void merge(const MetricsReport& other);
};

/// One-vs-rest counts for `positive` against every other class.
ConfusionCounts one_vs_rest(std::span<const int> y_true, std::span<const int> y_pred, int positive);

MetricsReport classification_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                                     std::size_t n_classes, Averaging averaging = Averaging::micro);
MetricsReport regression_metrics(std::span<const double> y_true, std::span<const double> y_pred);
MetricsReport interval_metrics(std::span<const PredictionInterval> intervals,
                               std::span<const double> y_true);

/// 2PR / (P + R), undefined when either input is or P + R == 0.
std::optional<double> f_measure(std::optional<double> precision, std::optional<double> recall);

}  // namespace cepuq
