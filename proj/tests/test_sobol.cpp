// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cepuq/dataset.hpp"
#include "cepuq/error.hpp"
#include "cepuq/forest.hpp"
#include "cepuq/sobol.hpp"

using namespace cepuq;

namespace {

constexpr double kPi = std::numbers::pi;

InputRange cube(std::size_t d, double lo, double hi) {
  return {std::vector<double>(d, lo), std::vector<double>(d, hi)};
}

double ishigami(std::span<const double> x) {
  return std::sin(x[0]) + 7.0 * std::sin(x[1]) * std::sin(x[1]) +
         0.1 * std::pow(x[2], 4) * std::sin(x[0]);
}

// Closed-form variance decomposition of the Ishigami function (a = 7, b = 0.1)
// with x_i ~ U[-pi, pi]:
//   V1  = (1 + b pi^4 / 5)^2 / 2
//   V2  = a^2 / 8
//   V13 = b^2 pi^8 (1/18 - 1/50)
//   V   = V1 + V2 + V13
struct IshigamiTruth {
  double s1[3];
  double st[3];
};

IshigamiTruth ishigami_truth() {
  const double a = 7.0, b = 0.1;
  const double pi4 = std::pow(kPi, 4), pi8 = std::pow(kPi, 8);
  const double v1 = 0.5 * std::pow(1.0 + b * pi4 / 5.0, 2);
  const double v2 = a * a / 8.0;
  const double v13 = b * b * pi8 * (1.0 / 18.0 - 1.0 / 50.0);
  const double v = v1 + v2 + v13;
  return {{v1 / v, v2 / v, 0.0}, {(v1 + v13) / v, v2 / v, v13 / v}};
}

double total_error(std::size_t N, std::uint64_t seed) {
  const auto truth = ishigami_truth();
  const auto r = estimate_indices(ishigami, saltelli_sample(cube(3, -kPi, kPi), N, seed));
  double e = 0;
  for (std::size_t i = 0; i < 3; ++i) e += std::abs(r.s1[i] - truth.s1[i]) + std::abs(r.st[i] - truth.st[i]);
  return e;
}

}  // namespace

TEST(Saltelli, Construction) {
  const auto s = saltelli_sample(cube(2, 0.0, 1.0), 4, 3);
  EXPECT_EQ(s.A.rows(), 4u);
  EXPECT_EQ(s.AB.size(), 2u);
  EXPECT_EQ(s.evaluations(), 16u);
  for (const Matrix* m : {&s.A, &s.B, &s.AB[0], &s.AB[1]})
    for (double v : m->data()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(s.AB[0](j, 0), s.B(j, 0));
    EXPECT_EQ(s.AB[0](j, 1), s.A(j, 1));
    EXPECT_EQ(s.AB[1](j, 1), s.B(j, 1));
    EXPECT_EQ(s.AB[1](j, 0), s.A(j, 0));
  }
  EXPECT_EQ(saltelli_sample(cube(1, 0, 1), 8, 1).evaluations(), 24u);
}

TEST(Saltelli, Deterministic) {
  const auto a = saltelli_sample(cube(3, -1, 2), 64, 5), b = saltelli_sample(cube(3, -1, 2), 64, 5);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.B, b.B);
  EXPECT_EQ(a.AB, b.AB);
  EXPECT_NE(a.A, saltelli_sample(cube(3, -1, 2), 64, 6).A);
}

TEST(Saltelli, Errors) {
  EXPECT_THROW(saltelli_sample({{0.0}, {0.0}}, 8, 1), UsageError);
  EXPECT_THROW(saltelli_sample(cube(2, 0, 1), 1, 1), UsageError);
}

TEST(Sobol, AdditiveSymmetric) {
  const auto r = estimate_indices([](std::span<const double> x) { return x[0] + x[1]; },
                                  saltelli_sample(cube(2, 0, 1), 4096, 11));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(r.s1[i], 0.5, 0.03);
    EXPECT_NEAR(r.st[i], 0.5, 0.03);
    EXPECT_LE(std::abs(r.s1[i] - r.st[i]), 3.0 / std::sqrt(4096.0));
  }
  EXPECT_NEAR(r.output_variance, 1.0 / 6.0, 0.01);
}

TEST(Sobol, IshigamiClosedForm) {
  const auto truth = ishigami_truth();
  EXPECT_NEAR(truth.s1[0], 0.3139, 1e-4);
  EXPECT_NEAR(truth.s1[1], 0.4424, 1e-4);
  EXPECT_NEAR(truth.st[2], 0.2437, 1e-4);
  const auto r = estimate_indices(ishigami, saltelli_sample(cube(3, -kPi, kPi), 8192, 2024));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.s1[i], truth.s1[i], 0.05) << i;
  EXPECT_NEAR(r.st[2], truth.st[2], 0.05);
}

TEST(Sobol, IgnoredFeatureHasZeroTotal) {
  const auto r = estimate_indices(
      [](std::span<const double> x) { return x[0] * x[1] + std::exp(x[1]); },
      saltelli_sample(cube(3, 0, 1), 2048, 4));
  EXPECT_EQ(r.st[2], 0.0);  // f(A) == f(AB_3) exactly
  EXPECT_EQ(r.s1[2], 0.0);
}

TEST(Sobol, PropertyBounds) {
  const ScalarFunction fs[] = {
      ishigami,
      [](std::span<const double> x) { return x[0] * x[1] * x[2]; },
      [](std::span<const double> x) { return std::exp(x[0]) + 3 * x[1] * x[1] - x[2]; },
  };
  const std::size_t N = 2048;
  const double tol = 3.0 / std::sqrt(static_cast<double>(N));
  for (const auto& f : fs)
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto r = estimate_indices(f, saltelli_sample(cube(3, -kPi, kPi), N, seed));
      double sum = 0;
      for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_GE(r.st[i], r.s1[i] - tol);
        EXPECT_GE(r.s1[i], -tol);
        sum += r.s1[i];
      }
      EXPECT_LE(sum, 1 + tol);
    }
}

TEST(Sobol, ErrorShrinksWithSampleSize) {
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t N : {256u, 1024u, 4096u, 16384u}) {
    double e = 0;
    for (std::uint64_t seed = 100; seed < 105; ++seed) e += total_error(N, seed);
    EXPECT_LT(e, prev) << "N = " << N;
    prev = e;
  }
}

TEST(Sobol, ConstantFunctionFlagsZeroVariance) {
  const auto r = estimate_indices([](std::span<const double>) { return 4.0; },
                                  saltelli_sample(cube(2, 0, 1), 64, 1));
  EXPECT_TRUE(r.zero_variance);
  EXPECT_EQ(r.s1, (std::vector<double>{0, 0}));
  EXPECT_EQ(r.st, (std::vector<double>{0, 0}));
}

TEST(Sobol, SelectFeatures) {
  SobolResult r;
  r.st = {0.4, 0.02, 0.3, 0.3};
  EXPECT_EQ(select_features(r, 0.05), (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(select_features(r, 0.0).size(), 4u);
  r.st = {0.01, 0.03};
  EXPECT_EQ(select_features(r, 0.05), (std::vector<std::size_t>{1}));
  r.st = {0.6, 0.5, 0.001};  // temperature, smoke, flame
  EXPECT_EQ(select_features(r, 0.05), (std::vector<std::size_t>{0, 1}));
}

TEST(Sobol, FireScreeningDropsFlame) {
  const Dataset d = generate_synthetic_fire(10000, 2024);
  ForestParams p;
  p.n_trees = 50;
  p.seed = 1;
  const Forest f = fit_forest(d.X, d.y, p);
  const auto r = estimate_indices([&](std::span<const double> x) { return f.predict(x); },
                                  saltelli_sample(InputRange::from_data(d.X), 2048, 3));
  EXPECT_LT(r.st[2], 0.05);
  EXPECT_EQ(select_features(r, 0.05), (std::vector<std::size_t>{0, 1}));
}
