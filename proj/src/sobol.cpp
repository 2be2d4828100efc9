// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/sobol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cepuq/error.hpp"
#include "cepuq/simd.hpp"

namespace cepuq {

void InputRange::validate() const {
  if (lower.empty() || lower.size() != upper.size())
    throw UsageError("InvalidRange", "input range bounds are empty or mismatched");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw UsageError("InvalidRange", "feature " + std::to_string(i) + " has lower >= upper");
}

InputRange InputRange::from_data(const Matrix& X) {
  InputRange r;
  for (std::size_t f = 0; f < X.cols(); ++f) {
    const auto col = X.column(f);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    r.lower.push_back(*lo);
    r.upper.push_back(*hi);
  }
  return r;
}

SaltelliSample saltelli_sample(const InputRange& ranges, std::size_t N, std::uint64_t seed) {
  ranges.validate();
  if (N < 2) throw UsageError("InvalidSampleSize", "Saltelli base sample needs N >= 2");
  const std::size_t d = ranges.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SaltelliSample s{Matrix(N, d), Matrix(N, d), {}, N};
  auto fill = [&](Matrix& M) {
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t i = 0; i < d; ++i)
        M(j, i) = ranges.lower[i] + (ranges.upper[i] - ranges.lower[i]) * unit(rng);
  };
  fill(s.A);
  fill(s.B);
  s.AB.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    Matrix m = s.A;
    for (std::size_t j = 0; j < N; ++j) m(j, i) = s.B(j, i);
    s.AB.push_back(std::move(m));
  }
  return s;
}

SobolResult estimate_indices(const ScalarFunction& f, const SaltelliSample& s) {
  const std::size_t N = s.N;
  const std::size_t d = s.dim();
  auto evaluate = [&](const Matrix& M) {
    std::vector<double> out(N);
    for (std::size_t j = 0; j < N; ++j) out[j] = f(M.row(j));
    return out;
  };
  const auto fA = evaluate(s.A);
  const auto fB = evaluate(s.B);

  std::vector<double> pooled(fA);
  pooled.insert(pooled.end(), fB.begin(), fB.end());
  const double mean = simd::sum(pooled) / static_cast<double>(pooled.size());
  const std::vector<double> centre(pooled.size(), mean);
  const double var = simd::squared_diff_sum(pooled, centre) / static_cast<double>(pooled.size() - 1);

  SobolResult r{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), var, false};
  if (var < 1e-12) {
    r.zero_variance = true;
    return r;
  }

  const auto n = static_cast<double>(N);
  std::vector<double> delta(N);
  for (std::size_t i = 0; i < d; ++i) {
    const auto fAB = evaluate(s.AB[i]);
    for (std::size_t j = 0; j < N; ++j) delta[j] = fAB[j] - fA[j];
    r.s1[i] = simd::dot(fB, delta) / n / var;
    r.st[i] = simd::squared_diff_sum(fA, fAB) / n / (2.0 * var);
  }
  return r;
}

std::vector<std::size_t> select_features(const SobolResult& r, double threshold) {
  if (!(threshold >= 0.0 && threshold < 1.0))
    throw UsageError("InvalidThreshold", "selection threshold must lie in [0, 1)");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < r.st.size(); ++i)
    if (r.st[i] >= threshold) out.push_back(i);
  if (out.empty() && !r.st.empty())
    out.push_back(static_cast<std::size_t>(std::max_element(r.st.begin(), r.st.end()) - r.st.begin()));
  return out;
}

}  // namespace cepuq
