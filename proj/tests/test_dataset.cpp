// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "cepuq/dataset.hpp"
#include "cepuq/error.hpp"

using namespace cepuq;

namespace {

ColumnSchema xy_schema() {
  ColumnSchema s;
  s.feature_names = {"a", "b"};
  s.target_name = "y";
  s.target_kind = TargetKind::regression;
  return s;
}

Dataset ramp(std::size_t n) {
  Dataset d{xy_schema(), Matrix(n, 2), std::vector<double>(n)};
  for (std::size_t r = 0; r < n; ++r) {
    d.X(r, 0) = static_cast<double>(r);
    d.X(r, 1) = -static_cast<double>(r);
    d.y[r] = 0.5 * static_cast<double>(r);
  }
  return d;
}

}  // namespace

TEST(Csv, LoadsAndReordersColumns) {
  const auto d = parse_csv("y,b,a,extra\n1,2,3,x\n4,5,6,y\n7,8,9,z\n", xy_schema());
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.X(0, 0), 3.0);
  EXPECT_EQ(d.X(0, 1), 2.0);
  EXPECT_EQ(d.y[2], 7.0);
}

TEST(Csv, SkipsCommentLines) {
  const auto d = parse_csv("# info\na,b,y\n1,2,3\n", xy_schema());
  EXPECT_EQ(d.size(), 1u);
}

TEST(Csv, MissingTargetColumn) {
  try {
    parse_csv("a,b\n1,2\n", xy_schema());
    FAIL();
  } catch (const MissingColumn& e) {
    EXPECT_EQ(e.column(), "y");
    EXPECT_EQ(e.category(), ErrorCategory::data);
  }
}

TEST(Csv, NanCellReportsCoordinate) {
  try {
    parse_csv("a,b,y\n1,2,3\n4,NaN,6\n", xy_schema());
    FAIL();
  } catch (const NonNumericCell& e) {
    EXPECT_EQ(e.row(), 1u);
    EXPECT_EQ(e.column(), "b");
  }
}

TEST(Csv, GarbageAndEmptyCellsRejected) {
  EXPECT_THROW(parse_csv("a,b,y\n1,2x,3\n", xy_schema()), NonNumericCell);
  EXPECT_THROW(parse_csv("a,b,y\n1,,3\n", xy_schema()), NonNumericCell);
}

TEST(Csv, EmptyDataset) {
  try {
    parse_csv("a,b,y\n", xy_schema());
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.code(), "EmptyDataset");
  }
}

TEST(Csv, RoundTripIsExact) {
  Dataset d = ramp(4);
  d.X(1, 0) = 0.1 + 0.2;
  d.X(2, 1) = 1.0 / 3.0;
  d.y[3] = 6.02214076e23;
  const auto back = parse_csv(to_csv(d), d.schema);
  EXPECT_EQ(back.X, d.X);
  EXPECT_EQ(back.y, d.y);
}

TEST(Csv, FormatRealParsesBack) {
  for (double v : {0.0, -0.0, 1.0, 0.1, 1e-300, 123456789.123456789, 5e-324, -2.5})
  {
    const std::string text = format_real(v);
    double back = 1.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    EXPECT_EQ(back, v) << text;
    EXPECT_EQ(std::signbit(back), std::signbit(v));
  }
  EXPECT_EQ(format_real(0.5), "0.5");
}

TEST(Csv, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "cepuq_dataset_roundtrip.csv";
  const Dataset d = ramp(5);
  write_csv(path, d);
  const Dataset back = load_csv(path, d.schema);
  EXPECT_EQ(back.X, d.X);
  std::filesystem::remove(path);
  EXPECT_THROW(load_csv(path, d.schema), DataError);
}

TEST(Dataset, LabelOutsideClassSet) {
  ColumnSchema s = xy_schema();
  s.target_kind = TargetKind::binary;
  EXPECT_THROW(parse_csv("a,b,y\n1,2,2\n", s), DataError);
  EXPECT_THROW(parse_csv("a,b,y\n1,2,0.5\n", s), DataError);
}

TEST(Schema, Validation) {
  ColumnSchema s = xy_schema();
  s.feature_names = {"a", "a"};
  EXPECT_THROW(s.validate(), UsageError);
  s.feature_names = {"a", "y"};
  EXPECT_THROW(s.validate(), UsageError);
  s = xy_schema();
  s.target_kind = TargetKind::multiclass;
  s.n_classes = 1;
  EXPECT_THROW(s.validate(), UsageError);
}

TEST(Split, PaperScaleSizes) {
  // Sizes only; the permutation is checked on smaller inputs.
  const std::size_t n = 532014;
  const std::size_t test = static_cast<std::size_t>(std::llround(n / 3.0));
  const std::size_t cal = (n - test) / 2;
  EXPECT_EQ(test, 177338u);
  EXPECT_EQ(cal, 177338u);
  EXPECT_EQ(n - test - cal, 177338u);
}

TEST(Split, QuarterOfHundred) {
  const auto r = split_three_way(ramp(100), {0.25, CalibrationMode::even_split, 9});
  EXPECT_EQ(r.test.size(), 25u);
  ASSERT_TRUE(r.calibrate);
  EXPECT_EQ(r.calibrate->size(), 37u);
  EXPECT_EQ(r.train.size(), 38u);
}

TEST(Split, ThirdsOfLargeInput) {
  const auto r = split_three_way(ramp(6000), {1.0 / 3.0, CalibrationMode::even_split, 1});
  EXPECT_EQ(r.test.size(), 2000u);
  EXPECT_EQ(r.calibrate->size(), 2000u);
  EXPECT_EQ(r.train.size(), 2000u);
}

TEST(Split, DeterministicIndices) {
  const SplitSpec spec{0.3, CalibrationMode::even_split, 42};
  const auto a = split_three_way(ramp(10), spec);
  const auto b = split_three_way(ramp(10), spec);
  EXPECT_EQ(a.train_rows, b.train_rows);
  EXPECT_EQ(a.calibrate_rows, b.calibrate_rows);
  EXPECT_EQ(a.test_rows, b.test_rows);
  const auto c = split_three_way(ramp(10), {0.3, CalibrationMode::even_split, 43});
  EXPECT_TRUE(a.test_rows != c.test_rows || a.train_rows != c.train_rows);
}

TEST(Split, PartitionsDisjointAndExhaustive) {
  for (std::size_t n : {3u, 7u, 10u, 101u, 997u})
    for (double f : {0.1, 0.25, 1.0 / 3.0, 0.5})
      for (std::uint64_t seed : {0ull, 5ull}) {
        const auto d = ramp(n);
        SplitResult r;
        try {
          r = split_three_way(d, {f, CalibrationMode::even_split, seed});
        } catch (const DataError& e) {
          EXPECT_EQ(e.code(), "PartitionTooSmall");
          continue;
        }
        std::vector<std::size_t> all = r.train_rows;
        all.insert(all.end(), r.calibrate_rows.begin(), r.calibrate_rows.end());
        all.insert(all.end(), r.test_rows.begin(), r.test_rows.end());
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> expect(n);
        std::iota(expect.begin(), expect.end(), std::size_t{0});
        EXPECT_EQ(all, expect);
        // Partitions carry the rows they claim.
        for (std::size_t i = 0; i < r.test_rows.size(); ++i)
          EXPECT_EQ(r.test.y[i], d.y[r.test_rows[i]]);
      }
}

TEST(Split, WithoutCalibration) {
  const auto r = split_three_way(ramp(10), {0.3, CalibrationMode::none, 1});
  EXPECT_FALSE(r.calibrate);
  EXPECT_EQ(r.test.size(), 3u);
  EXPECT_EQ(r.train.size(), 7u);
}

TEST(Split, TooSmall) {
  EXPECT_THROW(split_three_way(ramp(2), {1.0 / 3.0, CalibrationMode::even_split, 1}), DataError);
}

TEST(Traffic, CongestionLevels) {
  EXPECT_EQ(congestion_level(0.0), 0);
  EXPECT_EQ(congestion_level(0.1), 1);
  EXPECT_EQ(congestion_level(82.5), 1);
  EXPECT_EQ(congestion_level(100.0), 2);
  EXPECT_EQ(congestion_level(165.0), 2);
  EXPECT_EQ(congestion_level(165.1), 3);
  EXPECT_EQ(congestion_level(250.0), 3);
}

TEST(Traffic, ShapesAndRanges) {
  const auto reg = generate_synthetic_traffic(5000, 7, TrafficTask::regression);
  EXPECT_EQ(reg.n_features(), 4u);
  EXPECT_EQ(reg.schema.feature_names,
            (std::vector<std::string>{"speed", "flow", "occupancy", "halting_duration"}));
  for (double y : reg.y) {
    EXPECT_GE(y, 0.0);
    EXPECT_LE(y, 250.0);
  }
  const auto bin = generate_synthetic_traffic(5000, 7, TrafficTask::binary);
  const auto mul = generate_synthetic_traffic(5000, 7, TrafficTask::multilevel);
  // Same seed gives the same latent draws, so the labels derive from reg.y.
  EXPECT_EQ(bin.X, reg.X);
  for (std::size_t r = 0; r < reg.size(); ++r) {
    EXPECT_EQ(bin.y[r], reg.y[r] > 0.0 ? 1.0 : 0.0);
    EXPECT_EQ(mul.y[r], congestion_level(reg.y[r]));
  }
  std::set<double> classes(mul.y.begin(), mul.y.end());
  EXPECT_EQ(classes, (std::set<double>{0, 1, 2, 3}));
  EXPECT_NO_THROW(mul.validate());
}

TEST(Traffic, Deterministic) {
  const auto a = generate_synthetic_traffic(5000, 7, TrafficTask::multilevel);
  const auto b = generate_synthetic_traffic(5000, 7, TrafficTask::multilevel);
  EXPECT_EQ(to_csv(a), to_csv(b));
  EXPECT_NE(to_csv(a), to_csv(generate_synthetic_traffic(5000, 8, TrafficTask::multilevel)));
  EXPECT_THROW(generate_synthetic_traffic(99, 7, TrafficTask::binary), UsageError);
}

TEST(Fire, LabelRule) {
  EXPECT_EQ(fire_label(kAmbientTemperature, kAmbientSmoke), 0);
  EXPECT_EQ(fire_label(kAmbientTemperature + 18.0, kAmbientSmoke + 220.0), 1);
  // Wholly a function of temperature and smoke.
  const auto d = generate_synthetic_fire(2000, 3);
  EXPECT_EQ(d.schema.feature_names, (std::vector<std::string>{"temperature", "smoke", "flame"}));
  for (std::size_t r = 0; r < d.size(); ++r) {
    EXPECT_EQ(d.y[r], fire_label(d.X(r, 0), d.X(r, 1)));
    EXPECT_TRUE(d.X(r, 2) == 0.0 || d.X(r, 2) == 1.0);
  }
  EXPECT_EQ(to_csv(d), to_csv(generate_synthetic_fire(2000, 3)));
}
