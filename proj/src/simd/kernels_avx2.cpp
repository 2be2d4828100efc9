// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 only; callers must check CPU support first.

#include <immintrin.h>

#include "cepuq/detail/simd_kernels.hpp"

namespace cepuq::simd::detail::avx2 {

static_assert(kLanes == 4, "AVX2 kernels hold one Kahan lane per double in a __m256d");

namespace {

struct KahanVec {
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();

  void add(__m256d x) {
    const __m256d y = _mm256_sub_pd(x, c);
    const __m256d t = _mm256_add_pd(s, y);
    c = _mm256_sub_pd(_mm256_sub_pd(t, s), y);
    s = t;
  }

  double finish(const double* tail, std::size_t tail_len) const {
    alignas(32) double ls[4];
    alignas(32) double lc[4];
    _mm256_store_pd(ls, s);
    _mm256_store_pd(lc, c);
    return fold_lanes(ls, lc, tail, tail_len);
  }
};

}  // namespace

void squared_distances(const double* columns, std::size_t n_rows, const double* query,
                       std::size_t dim, double* out) {
  std::size_t r = 0;
  for (; r + 4 <= n_rows; r += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t f = 0; f < dim; ++f) {
      const __m256d x = _mm256_loadu_pd(columns + f * n_rows + r);
      const __m256d d = _mm256_sub_pd(x, _mm256_set1_pd(query[f]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + r, acc);
  }
  for (; r < n_rows; ++r) {
    double acc = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      const double d = columns[f * n_rows + r] - query[f];
      acc = acc + d * d;
    }
    out[r] = acc;
  }
}

double sum(const double* v, std::size_t n) {
  KahanVec k;
  const std::size_t full = n - n % 4;
  for (std::size_t i = 0; i < full; i += 4) k.add(_mm256_loadu_pd(v + i));
  return k.finish(v + full, n - full);
}

double dot(const double* a, const double* b, std::size_t n) {
  KahanVec k;
  const std::size_t full = n - n % 4;
  for (std::size_t i = 0; i < full; i += 4)
    k.add(_mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double tail[4];
  for (std::size_t i = full; i < n; ++i) tail[i - full] = a[i] * b[i];
  return k.finish(tail, n - full);
}

double squared_diff_sum(const double* a, const double* b, std::size_t n) {
  KahanVec k;
  const std::size_t full = n - n % 4;
  for (std::size_t i = 0; i < full; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    k.add(_mm256_mul_pd(d, d));
  }
  double tail[4];
  for (std::size_t i = full; i < n; ++i) {
    const double d = a[i] - b[i];
    tail[i - full] = d * d;
  }
  return k.finish(tail, n - full);
}

}  // namespace cepuq::simd::detail::avx2
