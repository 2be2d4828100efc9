// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cepuq/error.hpp"

namespace cepuq {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b)
    throw DataError("LengthMismatch",
                    "length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> mean_of_defined(const std::vector<std::optional<double>>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& x : v)
    if (x) {
      s += *x;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

}  // namespace

void MetricsReport::merge(const MetricsReport& o) {
  if (task.empty()) task = o.task;
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(accuracy, o.accuracy);
  take(sensitivity, o.sensitivity);
  take(specificity, o.specificity);
  take(precision, o.precision);
  take(recall, o.recall);
  take(f_measure, o.f_measure);
  take(counts, o.counts);
  take(r2, o.r2);
  take(mae, o.mae);
  take(mse, o.mse);
  take(medae, o.medae);
  take(coverage, o.coverage);
  take(mean_width, o.mean_width);
}

std::optional<double> f_measure(std::optional<double> p, std::optional<double> r) {
  if (!p || !r || *p + *r == 0.0) return std::nullopt;
  return 2.0 * *p * *r / (*p + *r);
}

ConfusionCounts one_vs_rest(std::span<const int> y_true, std::span<const int> y_pred,
                            int positive) {
  check_lengths(y_true.size(), y_pred.size());
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == positive;
    const bool p = y_pred[i] == positive;
    if (t && p) ++c.tp;
    else if (t) ++c.fn;
    else if (p) ++c.fp;
    else ++c.tn;
  }
  return c;
}

MetricsReport classification_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                                     std::size_t n_classes, Averaging averaging) {
  check_lengths(y_true.size(), y_pred.size());
  if (n_classes < 2) throw UsageError("InvalidClassCount", "need at least 2 classes");
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] < 0 || y_pred[i] < 0 || static_cast<std::size_t>(y_true[i]) >= n_classes ||
        static_cast<std::size_t>(y_pred[i]) >= n_classes)
      throw DataError("InvalidLabel", "label outside class set at row " + std::to_string(i));

  MetricsReport r;
  r.task = n_classes == 2 ? "binary" : "multiclass";
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) correct += y_true[i] == y_pred[i];
  r.accuracy = ratio(correct, y_true.size());

  std::vector<ConfusionCounts> per_class;
  for (std::size_t c = 1; c < n_classes; ++c)
    per_class.push_back(one_vs_rest(y_true, y_pred, static_cast<int>(c)));

  if (averaging == Averaging::micro || n_classes == 2) {
    ConfusionCounts pooled;
    for (const auto& c : per_class) {
      pooled.tp += c.tp;
      pooled.fn += c.fn;
      pooled.tn += c.tn;
      pooled.fp += c.fp;
    }
    r.counts = pooled;
    r.sensitivity = ratio(pooled.tp, pooled.tp + pooled.fn);
    r.specificity = ratio(pooled.tn, pooled.tn + pooled.fp);
    r.precision = ratio(pooled.tp, pooled.tp + pooled.fp);
  } else {
    std::vector<std::optional<double>> sens, spec, prec;
    for (const auto& c : per_class) {
      sens.push_back(ratio(c.tp, c.tp + c.fn));
      spec.push_back(ratio(c.tn, c.tn + c.fp));
      prec.push_back(ratio(c.tp, c.tp + c.fp));
    }
    r.sensitivity = mean_of_defined(sens);
    r.specificity = mean_of_defined(spec);
    r.precision = mean_of_defined(prec);
  }
  r.recall = r.sensitivity;
  r.f_measure = f_measure(r.precision, r.recall);
  return r;
}

MetricsReport regression_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  if (y_true.empty()) throw DataError("EmptyDataset", "no rows to evaluate");
  const auto n = static_cast<double>(y_true.size());
  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= n;

  double sse = 0.0, sst = 0.0, sae = 0.0;
  std::vector<double> abs_err(y_true.size());
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_true[i] - y_pred[i];
    sse += e * e;
    sae += std::abs(e);
    sst += (y_true[i] - mean) * (y_true[i] - mean);
    abs_err[i] = std::abs(e);
  }
  std::sort(abs_err.begin(), abs_err.end());
  const std::size_t m = abs_err.size();

  MetricsReport r;
  r.task = "regression";
  if (sst > 0.0) r.r2 = 1.0 - sse / sst;
  r.mae = sae / n;
  r.mse = sse / n;
  r.medae = m % 2 == 1 ? abs_err[m / 2] : (abs_err[m / 2 - 1] + abs_err[m / 2]) / 2.0;
  return r;
}

MetricsReport interval_metrics(std::span<const PredictionInterval> intervals,
                               std::span<const double> y_true) {
  check_lengths(intervals.size(), y_true.size());
  MetricsReport r;
  if (intervals.empty()) return r;
  std::size_t covered = 0;
  double width = 0.0;
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    covered += intervals[i].contains(y_true[i]);
    width += intervals[i].width();
  }
  r.coverage = ratio(covered, intervals.size());
  r.mean_width = width / static_cast<double>(intervals.size());
  return r;
}

}  // namespace cepuq
