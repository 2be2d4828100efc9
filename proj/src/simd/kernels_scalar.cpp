// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/detail/simd_kernels.hpp"

namespace cepuq::simd::detail::scalar {

namespace {

// Blocked Kahan over a generated sequence: element i feeds lane i % kLanes.
template <class Term>
double blocked_kahan(std::size_t n, Term term) {
  double s[kLanes] = {};
  double c[kLanes] = {};
  const std::size_t full = n - n % kLanes;
  for (std::size_t i = 0; i < full; i += kLanes) {
    for (std::size_t j = 0; j < kLanes; ++j) {
      const double y = term(i + j) - c[j];
      const double t = s[j] + y;
      c[j] = (t - s[j]) - y;
      s[j] = t;
    }
  }
  double tail[kLanes];
  for (std::size_t i = full; i < n; ++i) tail[i - full] = term(i);
  return fold_lanes(s, c, tail, n - full);
}

}  // namespace

void squared_distances(const double* columns, std::size_t n_rows, const double* query,
                       std::size_t dim, double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    double acc = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      const double d = columns[f * n_rows + r] - query[f];
      acc = acc + d * d;
    }
    out[r] = acc;
  }
}

double sum(const double* v, std::size_t n) {
  return blocked_kahan(n, [v](std::size_t i) { return v[i]; });
}

double dot(const double* a, const double* b, std::size_t n) {
  return blocked_kahan(n, [a, b](std::size_t i) { return a[i] * b[i]; });
}

double squared_diff_sum(const double* a, const double* b, std::size_t n) {
  return blocked_kahan(n, [a, b](std::size_t i) {
    const double d = a[i] - b[i];
    return d * d;
  });
}

}  // namespace cepuq::simd::detail::scalar
