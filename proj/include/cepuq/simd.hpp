// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel numeric kernels shared by the kNN normalizer and the Sobol
// estimators. Each kernel has a scalar reference and an AVX2 variant; the
// variant is chosen once at startup from CPUID and can be overridden with
// CEPUQ_SIMD=scalar|avx2 or set_backend().
//
// Every backend performs the same floating-point operations in the same order
// per lane, so results are bit-identical across backends.

namespace cepuq::simd {

enum class Backend { scalar, avx2 };

std::string_view backend_name(Backend b) noexcept;
bool backend_supported(Backend b) noexcept;
/// Widest backend the running CPU supports.
Backend best_backend() noexcept;
Backend active_backend() noexcept;
/// Throws UsageError if `b` is not supported on this CPU/build.
void set_backend(Backend b);

/// out[r] = sum_f (columns[f * n_rows + r] - query[f])^2 for r < n_rows.
/// `columns` is feature-major (see Matrix::transposed()).
void squared_distances(std::span<const double> columns, std::size_t n_rows,
                       std::span<const double> query, std::span<double> out);

/// Compensated (4-lane Kahan) reductions.
double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
/// sum_i (a[i] - b[i])^2
double squared_diff_sum(std::span<const double> a, std::span<const double> b);

}  // namespace cepuq::simd
