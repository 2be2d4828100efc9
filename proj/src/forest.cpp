// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "cepuq/error.hpp"
#include "cepuq/rng.hpp"

namespace cepuq {

std::size_t MaxFeatures::count(std::size_t d) const noexcept {
  std::size_t k = d;
  switch (kind) {
    case Kind::all:
      break;
    case Kind::sqrt:
      k = static_cast<std::size_t>(std::sqrt(static_cast<double>(d)));
      break;
    case Kind::fraction:
      k = static_cast<std::size_t>(fraction * static_cast<double>(d));
      break;
  }
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(d, 1));
}

void ForestParams::validate() const {
  if (n_trees < 1) throw UsageError("InvalidForestParams", "n_trees must be >= 1");
  if (min_samples_split < 2)
    throw UsageError("InvalidForestParams", "min_samples_split must be >= 2");
  if (max_features.kind == MaxFeatures::Kind::fraction &&
      !(max_features.fraction > 0.0 && max_features.fraction <= 1.0))
    throw UsageError("InvalidForestParams", "max_features fraction must lie in (0, 1]");
}

RegressionTree::RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

double RegressionTree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const Node& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                       : n.right);
  }
  return nodes_[i].value;
}

std::size_t RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

Forest::Forest(std::vector<RegressionTree> trees, ForestParams params, TrainingFingerprint fp)
    : trees_(std::move(trees)), params_(std::move(params)), fingerprint_(fp) {}

double Forest::predict(std::span<const double> x) const {
  if (x.size() != fingerprint_.features) throw DimensionMismatch(fingerprint_.features, x.size());
  double acc = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& t : trees_) {
    const double v = t.predict(x);
    acc += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Rounding must not push the mean outside the leaf values it averages.
  return std::clamp(acc / static_cast<double>(trees_.size()), lo, hi);
}

std::vector<double> Forest::predict(const Matrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
  return out;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -1.0;  // sumL^2/nL + sumR^2/nR; larger is better
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const double> y, const ForestParams& params,
              std::uint64_t seed)
      : X_(X), y_(y), params_(params), rng_(seed) {}

  RegressionTree build() {
    const std::size_t n = X_.rows();
    std::vector<std::size_t> rows(n);
    if (params_.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(rng_);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }

    std::vector<RegressionTree::Node> nodes(1);
    struct Work {
      int node;
      std::size_t begin, end, depth;
    };
    std::vector<Work> stack{{0, 0, n, 0}};
    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();
      const std::span<std::size_t> idx(rows.data() + w.begin, w.end - w.begin);
      const bool constant = constant_target(idx);
      nodes[static_cast<std::size_t>(w.node)].value = constant ? y_[idx.front()] : mean_target(idx);

      if (idx.size() < params_.min_samples_split || constant ||
          (params_.max_depth && w.depth >= *params_.max_depth))
        continue;
      const Split s = best_split(idx);
      if (s.feature < 0) continue;

      const auto f = static_cast<std::size_t>(s.feature);
      const auto mid = std::stable_partition(idx.begin(), idx.end(), [&](std::size_t r) {
        return X_(r, f) <= s.threshold;
      });
      const std::size_t split_at = w.begin + static_cast<std::size_t>(mid - idx.begin());

      const int left = static_cast<int>(nodes.size());
      nodes.emplace_back();
      const int right = static_cast<int>(nodes.size());
      nodes.emplace_back();
      auto& node = nodes[static_cast<std::size_t>(w.node)];
      node.feature = s.feature;
      node.threshold = s.threshold;
      node.left = left;
      node.right = right;
      stack.push_back({right, split_at, w.end, w.depth + 1});
      stack.push_back({left, w.begin, split_at, w.depth + 1});
    }
    return RegressionTree(std::move(nodes));
  }

 private:
  double mean_target(std::span<const std::size_t> idx) const {
    double s = 0.0;
    for (std::size_t r : idx) s += y_[r];
    return s / static_cast<double>(idx.size());
  }

  bool constant_target(std::span<const std::size_t> idx) const {
    const double first = y_[idx.front()];
    return std::all_of(idx.begin(), idx.end(), [&](std::size_t r) { return y_[r] == first; });
  }

  // Candidate features: a random subset of max_features features, scanned in
  // ascending index order. If none of them admits a split, the remaining
  // features are tried in random order until one does.
  Split best_split(std::span<const std::size_t> idx) {
    const std::size_t d = X_.cols();
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = params_.max_features.count(d);
    if (k < d) std::shuffle(order.begin(), order.end(), rng_);
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));

    Split best;
    for (std::size_t i = 0; i < k; ++i) scan_feature(idx, order[i], best);
    for (std::size_t i = k; i < d && best.feature < 0; ++i) scan_feature(idx, order[i], best);
    return best;
  }

  void scan_feature(std::span<const std::size_t> idx, std::size_t f, Split& best) {
    const std::size_t m = idx.size();
    pairs_.resize(m);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      pairs_[i] = {X_(idx[i], f), y_[idx[i]]};
      total += pairs_[i].second;
    }
    std::sort(pairs_.begin(), pairs_.end());

    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      left_sum += pairs_[i].second;
      const double lo = pairs_[i].first;
      const double hi = pairs_[i + 1].first;
      if (lo == hi) continue;
      const auto n_left = static_cast<double>(i + 1);
      const auto n_right = static_cast<double>(m - i - 1);
      const double right_sum = total - left_sum;
      const double score = left_sum * left_sum / n_left + right_sum * right_sum / n_right;
      // Strict comparison keeps the earlier (lower feature, lower threshold) split on ties.
      if (best.feature < 0 || score > best.score) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = {static_cast<int>(f), threshold, score};
      }
    }
  }

  const Matrix& X_;
  std::span<const double> y_;
  const ForestParams& params_;
  std::mt19937_64 rng_;
  std::vector<std::pair<double, double>> pairs_;
};

}  // namespace

Forest fit_forest(const Matrix& X, std::span<const double> y, const ForestParams& params) {
  params.validate();
  if (X.rows() == 0 || y.empty())
    throw DataError("EmptyTrainingSet", "cannot fit a forest on zero rows");
  if (X.rows() != y.size()) throw DataError("ShapeMismatch", "X rows != y length");
  for (double v : X.data())
    if (!std::isfinite(v)) throw DataError("NonFiniteInput", "non-finite feature value");
  for (double v : y)
    if (!std::isfinite(v)) throw DataError("NonFiniteInput", "non-finite target value");

  std::vector<RegressionTree> trees;
  trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t)
    trees.push_back(TreeBuilder(X, y, params, derive_seed(params.seed, t)).build());
  return Forest(std::move(trees), params, {X.rows(), X.cols(), params.seed});
}

}  // namespace cepuq
