// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cepuq/matrix.hpp"

namespace cepuq {

/// Per-node feature subsampling rule.
struct MaxFeatures {
  enum class Kind { all, sqrt, fraction };
  Kind kind = Kind::all;
  double fraction = 1.0;

  /// Number of candidate features out of `d`; always in [1, d].
  std::size_t count(std::size_t d) const noexcept;
  bool operator==(const MaxFeatures&) const = default;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_split = 2;
  MaxFeatures max_features;
  bool bootstrap = true;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const ForestParams&) const = default;
};

/// Flattened CART regression tree. Node 0 is the root; a node with
/// feature < 0 is a leaf. Samples with x[feature] <= threshold go left.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const Node&) const = default;
  };

  RegressionTree() = default;
  explicit RegressionTree(std::vector<Node> nodes);

  double predict(std::span<const double> x) const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<Node> nodes_;
};

struct TrainingFingerprint {
  std::size_t rows = 0;
  std::size_t features = 0;
  std::uint64_t seed = 0;
  bool operator==(const TrainingFingerprint&) const = default;
};

class Forest {
 public:
  Forest() = default;
  Forest(std::vector<RegressionTree> trees, ForestParams params, TrainingFingerprint fp);

  /// Mean of the per-tree leaf values reached by `x`.
  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Matrix& X) const;

  std::size_t n_features() const noexcept { return fingerprint_.features; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  const ForestParams& params() const noexcept { return params_; }
  const TrainingFingerprint& fingerprint() const noexcept { return fingerprint_; }

  bool operator==(const Forest&) const = default;

 private:
  std::vector<RegressionTree> trees_;
  ForestParams params_;
  TrainingFingerprint fingerprint_;
};

/// Grows one tree per bootstrap resample (or on the full data), choosing at
/// each node the split with the largest variance reduction. Ties go to the
/// lower feature index, then the lower threshold.
Forest fit_forest(const Matrix& X, std::span<const double> y, const ForestParams& params);

inline double predict_mean(const Forest& f, std::span<const double> x) { return f.predict(x); }

}  // namespace cepuq
