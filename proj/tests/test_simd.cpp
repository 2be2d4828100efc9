// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "cepuq/error.hpp"
#include "cepuq/simd.hpp"

using namespace cepuq;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

class BackendGuard {
 public:
  BackendGuard() : saved_(simd::active_backend()) {}
  ~BackendGuard() { simd::set_backend(saved_); }

 private:
  simd::Backend saved_;
};

long double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

}  // namespace

TEST(Simd, ScalarAlwaysSupported) {
  EXPECT_TRUE(simd::backend_supported(simd::Backend::scalar));
  EXPECT_EQ(simd::backend_name(simd::Backend::avx2), "avx2");
  EXPECT_TRUE(simd::backend_supported(simd::best_backend()));
}

TEST(Simd, ScalarMatchesExtendedPrecision) {
  BackendGuard guard;
  simd::set_backend(simd::Backend::scalar);
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
    const auto a = random_vector(rng, n, 3.0);
    const auto b = random_vector(rng, n, 3.0);
    long double s = 0, d2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s += a[i];
      const long double d = static_cast<long double>(a[i]) - b[i];
      d2 += d * d;
    }
    const double tol = 1e-12 * (1.0 + static_cast<double>(n));
    EXPECT_NEAR(simd::sum(a), static_cast<double>(s), tol);
    EXPECT_NEAR(simd::dot(a, b), static_cast<double>(naive_dot(a, b)), tol * 10);
    EXPECT_NEAR(simd::squared_diff_sum(a, b), static_cast<double>(d2), tol * 10);
  }
}

TEST(Simd, CompensationBeatsNaiveSum) {
  BackendGuard guard;
  simd::set_backend(simd::Backend::scalar);
  std::vector<double> v(4001, 0.1);
  v[0] = 1e16;
  long double exact = 1e16L;
  for (std::size_t i = 1; i < v.size(); ++i) exact += 0.1L;
  EXPECT_NEAR(simd::sum(v), static_cast<double>(exact), 4.0);
}

TEST(Simd, DistancesMatchDirectFormula) {
  BackendGuard guard;
  simd::set_backend(simd::Backend::scalar);
  std::mt19937_64 rng(2);
  const std::size_t rows = 37, d = 3;
  const auto cols = random_vector(rng, rows * d, 5.0);
  const auto q = random_vector(rng, d, 5.0);
  std::vector<double> out(rows);
  simd::squared_distances(cols, rows, q, out);
  for (std::size_t r = 0; r < rows; ++r) {
    double want = 0;
    for (std::size_t f = 0; f < d; ++f) want += (cols[f * rows + r] - q[f]) * (cols[f * rows + r] - q[f]);
    EXPECT_NEAR(out[r], want, 1e-12 * want + 1e-300);
  }
}

#if CEPUQ_HAVE_AVX2
TEST(Simd, Avx2BitIdenticalToScalar) {
  if (!simd::backend_supported(simd::Backend::avx2)) GTEST_SKIP() << "CPU lacks AVX2";
  BackendGuard guard;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng() % 300);
    const std::size_t d = 1 + static_cast<std::size_t>(rng() % 6);
    const auto a = random_vector(rng, n, std::ldexp(1.0, static_cast<int>(rng() % 40) - 20));
    const auto b = random_vector(rng, n, 1.0);
    const auto cols = random_vector(rng, n * d, 2.0);
    const auto q = random_vector(rng, d, 2.0);

    double s[2], dt[2], sd[2];
    std::vector<double> dist[2] = {std::vector<double>(n), std::vector<double>(n)};
    const simd::Backend backends[2] = {simd::Backend::scalar, simd::Backend::avx2};
    for (int k = 0; k < 2; ++k) {
      simd::set_backend(backends[k]);
      s[k] = simd::sum(a);
      dt[k] = simd::dot(a, b);
      sd[k] = simd::squared_diff_sum(a, b);
      simd::squared_distances(cols, n, q, dist[k]);
    }
    EXPECT_EQ(std::bit_cast<std::uint64_t>(s[0]), std::bit_cast<std::uint64_t>(s[1])) << n;
    EXPECT_EQ(std::bit_cast<std::uint64_t>(dt[0]), std::bit_cast<std::uint64_t>(dt[1])) << n;
    EXPECT_EQ(std::bit_cast<std::uint64_t>(sd[0]), std::bit_cast<std::uint64_t>(sd[1])) << n;
    for (std::size_t r = 0; r < n; ++r)
      ASSERT_EQ(std::bit_cast<std::uint64_t>(dist[0][r]), std::bit_cast<std::uint64_t>(dist[1][r]));
  }
}
#endif

TEST(Simd, LengthMismatchRejected) {
  const std::vector<double> a(3), b(4);
  EXPECT_THROW(simd::dot(a, b), Error);
}
