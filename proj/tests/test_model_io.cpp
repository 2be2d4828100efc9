// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "cepuq/error.hpp"
#include "cepuq/model_io.hpp"

using namespace cepuq;

namespace {

Dataset small_regression(std::size_t n, std::uint64_t seed) {
  return generate_synthetic_traffic(std::max<std::size_t>(n, 100), seed, TrafficTask::regression)
      .subset_rows([&] {
        std::vector<std::size_t> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = i;
        return r;
      }());
}

// Serialize, print, reparse and serialize again.
json reparse(const json& j) { return json::parse(j.dump()); }

}  // namespace

TEST(ModelIo, SchemaRoundTrip) {
  ColumnSchema s = traffic_schema(TrafficTask::multilevel);
  s.timestamp_column = "t";
  EXPECT_EQ(schema_from_json(reparse(to_json(s))), s);
  EXPECT_EQ(schema_from_json(to_json(fire_schema())), fire_schema());
}

TEST(ModelIo, ForestParamsRoundTrip) {
  ForestParams p;
  p.n_trees = 7;
  p.max_depth = 3;
  p.max_features.kind = MaxFeatures::Kind::fraction;
  p.max_features.fraction = 0.25;
  p.bootstrap = false;
  p.seed = 0xfedcba9876543210ULL;
  EXPECT_EQ(forest_params_from_json(reparse(to_json(p))), p);
}

TEST(ModelIo, ForestRoundTripPredictsIdentically) {
  const Dataset d = small_regression(300, 1);
  ForestParams p;
  p.n_trees = 10;
  p.seed = 3;
  const Forest f = fit_forest(d.X, d.y, p);
  const Forest back = forest_from_json(reparse(to_json(f)));
  EXPECT_EQ(back, f);
}

TEST(ModelIo, KnnRoundTrip) {
  const Dataset d = small_regression(50, 2);
  for (bool scale : {false, true}) {
    const KnnModel m = fit_knn(d.X, d.y, 4, scale);
    const KnnModel back = knn_from_json(reparse(to_json(m)));
    EXPECT_EQ(back, m);
    EXPECT_EQ(back.predict(d.X.row(7)), m.predict(d.X.row(7)));
  }
}

TEST(ModelIo, IcpRoundTrip) {
  const Dataset train = small_regression(200, 3), cal = small_regression(120, 4);
  IcpOptions o;
  o.forest.n_trees = 5;
  const IcpModel m = calibrate_icp(fit_icp(train, o), cal);
  const IcpModel back = icp_from_json(reparse(to_json(m)));
  for (std::size_t r = 0; r < cal.size(); ++r) {
    const auto a = m.predict_interval(cal.X.row(r), 0.03), b = back.predict_interval(cal.X.row(r), 0.03);
    EXPECT_EQ(a.lo, b.lo);
    EXPECT_EQ(a.hi, b.hi);
  }
  const IcpModel raw = icp_from_json(to_json(fit_icp(train, o)));
  EXPECT_FALSE(raw.calibrated());
}

TEST(ModelIo, BaselinesRoundTrip) {
  const GaussianClassBaseline g(Matrix(2, 2, std::vector<double>{0, 1, 2, 3}), {0.5, 2.0});
  const auto gb = gaussian_baseline_from_json(reparse(to_json(g)));
  EXPECT_EQ(gb.means(), g.means());
  EXPECT_EQ(gb.stds(), g.stds());
  const WeightedMeanRegressor w({1.5, -2.0}, {0.1, 0.3});
  const auto wb = weighted_regressor_from_json(reparse(to_json(w)));
  EXPECT_EQ(wb.means(), w.means());
  EXPECT_EQ(wb.feature_stds(), w.feature_stds());
}

TEST(ModelIo, MetricsNulls) {
  MetricsReport r;
  r.task = "binary";
  r.accuracy = 0.75;
  const json j = to_json(r);
  EXPECT_TRUE(j.at("precision").is_null());
  EXPECT_EQ(j.at("accuracy").get<double>(), 0.75);
  const MetricsReport back = metrics_from_json(j);
  EXPECT_EQ(back.accuracy, r.accuracy);
  EXPECT_FALSE(back.precision);
}

TEST(ModelIo, ModelDocumentRoundTrip) {
  ModelDocument doc;
  doc.kind = ModelKind::npm;
  doc.schema = fire_schema();
  doc.config_fingerprint = "0123456789abcdef";
  doc.alpha = 0.1;
  doc.model = GaussianClassBaseline(Matrix(2, 3, 1.0), {1, 1, 1});
  const ModelDocument back = model_document_from_json(reparse(to_json(doc)));
  EXPECT_EQ(back.kind, ModelKind::npm);
  EXPECT_EQ(back.schema, doc.schema);
  EXPECT_EQ(back.config_fingerprint, doc.config_fingerprint);
  EXPECT_EQ(back.alpha, 0.1);
  EXPECT_TRUE(std::holds_alternative<GaussianClassBaseline>(back.model));
  EXPECT_EQ(model_kind_from_string(to_string(ModelKind::ipm)), ModelKind::ipm);
}

TEST(ModelIo, RejectsForeignDocuments) {
  EXPECT_THROW(forest_from_json(json{{"format", "cepuq.knn"}, {"version", 1}}), ModelError);
  EXPECT_THROW(forest_from_json(json{{"format", "cepuq.forest"}, {"version", 99}}), ModelError);
  EXPECT_THROW(model_document_from_json(json::object()), ModelError);
  EXPECT_THROW(knn_from_json(json{{"format", "cepuq.knn"}, {"version", 1}, {"k", "five"}}), ModelError);

  const Dataset d = small_regression(20, 5);
  ForestParams p;
  p.n_trees = 1;
  json j = to_json(fit_forest(d.X, d.y, p));
  j["trees"][0]["left"][0] = 0;  // cycle back to the root
  EXPECT_THROW(forest_from_json(j), ModelError);
}
