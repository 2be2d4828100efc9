// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "cepuq/conformal.hpp"
#include "cepuq/decision.hpp"
#include "cepuq/error.hpp"

using namespace cepuq;

TEST(Decision, IntervalMean) {
  EXPECT_EQ(interval_mean({0, 1, 0.1}), 0.5);
  EXPECT_EQ(interval_mean({7, 13, 0.1}), 10.0);
  EXPECT_EQ(interval_mean({2.25, 2.25, 0.1}), 2.25);
}

TEST(Decision, Confidence) {
  EXPECT_NEAR(confidence_of(0.30), 70.0, 1e-9);
  EXPECT_EQ(confidence_of(0.05), 100.0);
  EXPECT_NEAR(confidence_of(0.8), 80.0, 1e-9);
  EXPECT_NEAR(confidence_of(2.8), 80.0, 1e-9);
  EXPECT_EQ(confidence_of(3.0), 100.0);
  EXPECT_NEAR(confidence_of(0.1), 90.0, 1e-9);
  EXPECT_NEAR(confidence_of(0.5), 50.0, 1e-9);
}

TEST(Decision, ConfidenceRange) {
  for (int i = 0; i <= 10000; ++i) {
    const double v = i / 10000.0;
    const double c = confidence_of(v);
    EXPECT_GT(c, 0.0);
    EXPECT_LE(c, 100.0);
    EXPECT_GE(c, 50.0);
  }
  // Negative means wrap like floor-mod.
  EXPECT_NEAR(confidence_of(-0.2), 80.0, 1e-9);
}

TEST(Decision, Binary) {
  const auto a = binary_decision(0.30);
  EXPECT_EQ(a.label, 0);
  EXPECT_NEAR(a.confidence, 70.0, 1e-9);
  const auto b = binary_decision(0.5);
  EXPECT_EQ(b.label, 0);
  EXPECT_NEAR(b.confidence, 50.0, 1e-9);
  const auto c = binary_decision(1.0);
  EXPECT_EQ(c.label, 1);
  EXPECT_EQ(c.confidence, 100.0);
  EXPECT_EQ(binary_decision(std::nextafter(0.5, 1.0)).label, 1);
}

TEST(Decision, BinaryDependsOnlyOnMeanSide) {
  for (double lo : {-3.0, -0.2, 0.1, 0.4})
    for (double shift : {0.0, 0.05, 0.09}) {
      const PredictionInterval p{lo, 0.6 - lo, 0.1};  // mean 0.3
      const PredictionInterval q{lo - shift * 10, 0.6 - lo + shift * 10, 0.1};
      EXPECT_EQ(binary_decision(interval_mean(p)).label, binary_decision(interval_mean(q)).label);
    }
}

TEST(Decision, Multiclass) {
  const ClassThresholds t({0.5, 1.5, 2.5});
  EXPECT_EQ(multiclass_decision(0.0, t).label, 0);
  EXPECT_EQ(multiclass_decision(1.2, t).label, 1);
  EXPECT_EQ(multiclass_decision(3.4, t).label, 3);
  EXPECT_EQ(multiclass_decision(1.5, t).label, 1);
  EXPECT_EQ(multiclass_decision(-0.7, t).label, 0);
  EXPECT_NEAR(multiclass_decision(1.2, t).confidence, 80.0, 1e-9);
}

TEST(Decision, MulticlassGridMatchesLinearScan) {
  for (std::size_t k : {2u, 3u, 4u, 6u}) {
    const ClassThresholds t = ClassThresholds::midpoints(k);
    ASSERT_EQ(t.bounds().size(), k - 1);
    for (int i = 0; i <= static_cast<int>(k) * 100; ++i) {
      const double m = i * 0.01;
      int want = static_cast<int>(k) - 1;
      for (std::size_t j = 0; j + 1 < k; ++j)
        if (m <= 0.5 + static_cast<double>(j)) {
          want = static_cast<int>(j);
          break;
        }
      ASSERT_EQ(multiclass_decision(m, t).label, want) << m;
    }
  }
}

TEST(Decision, ThresholdsValidated) {
  EXPECT_THROW(ClassThresholds({1.0, 1.0}), UsageError);
  EXPECT_THROW(ClassThresholds({2.0, 1.0}), UsageError);
  EXPECT_EQ(ClassThresholds::midpoints(4).bounds(), (std::vector<double>{0.5, 1.5, 2.5}));
}

TEST(Decision, Regression) {
  const auto r = regression_decision({7, 13, 0.03});
  EXPECT_EQ(r.value, 10.0);
  EXPECT_EQ(r.width, 6.0);
  const auto d = regression_decision({4.5, 4.5, 0.03});
  EXPECT_EQ(d.value, 4.5);
  EXPECT_EQ(d.width, 0.0);
}
