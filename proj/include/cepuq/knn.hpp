// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cepuq/matrix.hpp"

namespace cepuq {

/// Brute-force k-nearest-neighbor regressor (unweighted mean of the k nearest
/// targets, Euclidean distance, ties to the lower stored row).
class KnnModel {
 public:
  KnnModel() = default;
  /// `scale` enables per-feature z-scoring with statistics of X_ref.
  KnnModel(std::size_t k, Matrix X_ref, std::vector<double> y_ref, bool scale = false);

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& X) const;

  /// Indices of the min(k, n) nearest stored rows, nearest first.
  std::vector<std::size_t> neighbors(std::span<const double> x) const;

  std::size_t k() const noexcept { return k_; }
  bool scaled() const noexcept { return scale_; }
  const Matrix& X_ref() const noexcept { return X_ref_; }
  const std::vector<double>& y_ref() const noexcept { return y_ref_; }
  std::size_t n_features() const noexcept { return X_ref_.cols(); }

  bool operator==(const KnnModel& o) const {
    return k_ == o.k_ && scale_ == o.scale_ && X_ref_ == o.X_ref_ && y_ref_ == o.y_ref_;
  }

 private:
  std::vector<double> transform(std::span<const double> x) const;

  std::size_t k_ = 0;
  bool scale_ = false;
  Matrix X_ref_;
  std::vector<double> y_ref_;
  // Derived state, rebuilt from the fields above.
  std::vector<double> mean_, inv_std_;
  std::vector<double> columns_;  // feature-major (optionally scaled) copy of X_ref
};

KnnModel fit_knn(const Matrix& X, std::span<const double> y, std::size_t k, bool scale = false);

inline double predict_knn(const KnnModel& m, std::span<const double> x) { return m.predict(x); }

}  // namespace cepuq
