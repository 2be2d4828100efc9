// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cepuq/matrix.hpp"

namespace cepuq {

/// Independent uniform input distribution per feature.
struct InputRange {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const noexcept { return lower.size(); }
  /// Throws UsageError("InvalidRange") unless lower < upper everywhere.
  void validate() const;
  /// Observed [min, max] of each column.
  static InputRange from_data(const Matrix& X);
};

/// Paired-matrix design: A, B and, for each feature i, AB[i] = A with column i from B.
struct SaltelliSample {
  Matrix A;
  Matrix B;
  std::vector<Matrix> AB;
  std::size_t N = 0;

  std::size_t dim() const noexcept { return A.cols(); }
  std::size_t evaluations() const noexcept { return N * (dim() + 2); }
};

SaltelliSample saltelli_sample(const InputRange& ranges, std::size_t N, std::uint64_t seed);

struct SobolResult {
  std::vector<double> s1;  // first-order indices
  std::vector<double> st;  // total-effect indices
  double output_variance = 0.0;
  /// Set when the output variance is below 1e-12; indices are then all zero.
  bool zero_variance = false;
};

using ScalarFunction = std::function<double(std::span<const double>)>;

/// First-order indices use the Saltelli (2010) estimator
///   s1_i = mean_j[f(B_j) (f(AB_i,j) - f(A_j))] / Var,
/// total indices the Jansen estimator
///   st_i = mean_j[(f(A_j) - f(AB_i,j))^2] / (2 Var),
/// with Var the sample variance of f over A and B together.
SobolResult estimate_indices(const ScalarFunction& f, const SaltelliSample& s);

/// Indices with st >= threshold in original order; falls back to the single
/// argmax(st) when nothing passes.
std::vector<std::size_t> select_features(const SobolResult& r, double threshold);

}  // namespace cepuq
