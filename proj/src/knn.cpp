// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cepuq/error.hpp"
#include "cepuq/simd.hpp"

namespace cepuq {

KnnModel::KnnModel(std::size_t k, Matrix X_ref, std::vector<double> y_ref, bool scale)
    : k_(k), scale_(scale), X_ref_(std::move(X_ref)), y_ref_(std::move(y_ref)) {
  if (k_ < 1) throw UsageError("InvalidK", "k must be >= 1");
  if (X_ref_.rows() == 0 || y_ref_.empty())
    throw DataError("EmptyTrainingSet", "kNN needs at least one reference row");
  if (X_ref_.rows() != y_ref_.size()) throw DataError("ShapeMismatch", "X rows != y length");

  const std::size_t n = X_ref_.rows();
  const std::size_t d = X_ref_.cols();
  mean_.assign(d, 0.0);
  inv_std_.assign(d, 1.0);
  if (scale_) {
    for (std::size_t f = 0; f < d; ++f) {
      const auto col = X_ref_.column(f);
      const double mu = simd::sum(col) / static_cast<double>(n);
      double ss = 0.0;
      for (double v : col) ss += (v - mu) * (v - mu);
      const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      mean_[f] = mu;
      inv_std_[f] = sd > 0.0 ? 1.0 / sd : 1.0;
    }
  }
  columns_.resize(n * d);
  for (std::size_t f = 0; f < d; ++f)
    for (std::size_t r = 0; r < n; ++r)
      columns_[f * n + r] = (X_ref_(r, f) - mean_[f]) * inv_std_[f];
}

std::vector<double> KnnModel::transform(std::span<const double> x) const {
  if (x.size() != X_ref_.cols()) throw DimensionMismatch(X_ref_.cols(), x.size());
  std::vector<double> q(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) q[f] = (x[f] - mean_[f]) * inv_std_[f];
  return q;
}

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> x) const {
  const auto q = transform(x);
  const std::size_t n = X_ref_.rows();
  std::vector<double> dist(n);
  simd::squared_distances(columns_, n, q, dist);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(k_, n);
  auto closer = [&](std::size_t a, std::size_t b) {
    return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    closer);
  order.resize(take);
  return order;
}

double KnnModel::predict(std::span<const double> x) const {
  const auto nn = neighbors(x);
  double s = 0.0;
  for (std::size_t i : nn) s += y_ref_[i];
  return s / static_cast<double>(nn.size());
}

std::vector<double> KnnModel::predict(const Matrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
  return out;
}

KnnModel fit_knn(const Matrix& X, std::span<const double> y, std::size_t k, bool scale) {
  return KnnModel(k, X, std::vector<double>(y.begin(), y.end()), scale);
}

}  // namespace cepuq
