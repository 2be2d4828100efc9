// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "cepuq/detail/simd_kernels.hpp"
#include "cepuq/error.hpp"
#include "cepuq/simd.hpp"

namespace cepuq::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(CEPUQ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("CEPUQ_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Backend::avx2;
  }
  return best_backend();
}

std::atomic<Backend>& active() noexcept {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionMismatch(a, b);
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
  }
  return "unknown";
}

bool backend_supported(Backend b) noexcept {
  return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

Backend best_backend() noexcept { return cpu_has_avx2() ? Backend::avx2 : Backend::scalar; }

Backend active_backend() noexcept { return active().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw UsageError("UnsupportedBackend",
                     "SIMD backend '" + std::string(backend_name(b)) + "' is not supported here");
  active().store(b, std::memory_order_relaxed);
}

#if defined(CEPUQ_HAVE_AVX2)
#define CEPUQ_DISPATCH(fn, ...)                                       \
  (active_backend() == Backend::avx2 ? detail::avx2::fn(__VA_ARGS__) \
                                     : detail::scalar::fn(__VA_ARGS__))
#else
#define CEPUQ_DISPATCH(fn, ...) detail::scalar::fn(__VA_ARGS__)
#endif

void squared_distances(std::span<const double> columns, std::size_t n_rows,
                       std::span<const double> query, std::span<double> out) {
  check_same_size(columns.size(), n_rows * query.size());
  check_same_size(out.size(), n_rows);
  CEPUQ_DISPATCH(squared_distances, columns.data(), n_rows, query.data(), query.size(),
                 out.data());
}

double sum(std::span<const double> v) { return CEPUQ_DISPATCH(sum, v.data(), v.size()); }

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size());
  return CEPUQ_DISPATCH(dot, a.data(), b.data(), a.size());
}

double squared_diff_sum(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size());
  return CEPUQ_DISPATCH(squared_diff_sum, a.data(), b.data(), a.size());
}

#undef CEPUQ_DISPATCH

}  // namespace cepuq::simd
