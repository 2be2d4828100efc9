// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Per-backend kernel entry points. Exposed only for the dispatcher and the
// backend equivalence tests; library code goes through cepuq/simd.hpp.

#include <cstddef>

namespace cepuq::simd::detail {

// Lane count of the blocked Kahan accumulation. Fixed for every backend so
// the summation order does not depend on the instruction set.
inline constexpr std::size_t kLanes = 4;

// Folds per-lane Kahan state plus an unblocked tail into one value. Shared by
// all backends so the epilogue is identical.
inline double fold_lanes(const double* lane_sum, const double* lane_comp, const double* tail,
                         std::size_t tail_len) {
  double s = 0.0;
  double c = 0.0;
  auto add = [&](double x) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  };
  for (std::size_t j = 0; j < kLanes; ++j) add(lane_sum[j] - lane_comp[j]);
  for (std::size_t i = 0; i < tail_len; ++i) add(tail[i]);
  return s - c;
}

namespace scalar {
void squared_distances(const double* columns, std::size_t n_rows, const double* query,
                       std::size_t dim, double* out);
double sum(const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double squared_diff_sum(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
void squared_distances(const double* columns, std::size_t n_rows, const double* query,
                       std::size_t dim, double* out);
double sum(const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double squared_diff_sum(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace cepuq::simd::detail
