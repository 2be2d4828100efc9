// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/model_io.hpp"

#include "cepuq/error.hpp"

namespace cepuq {

namespace {

[[noreturn]] void invalid(const std::string& what) {
  throw ModelError("InvalidModelDocument", what);
}

// Runs a reader, turning JSON access errors into ModelError.
template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    invalid(std::string(what) + ": " + e.what());
  }
}

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from_rows(const json& rows, std::size_t cols) {
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto v = rows[r].get<std::vector<double>>();
    if (v.size() != cols) invalid("ragged matrix row");
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void require_format(const json& j, const std::string& format, int version) {
  if (!j.is_object() || !j.contains("format") || j.at("format") != format)
    invalid("expected a '" + format + "' document");
  if (!j.contains("version") || !j.at("version").is_number_integer() ||
      j.at("version").get<int>() > version || j.at("version").get<int>() < 1)
    invalid("unsupported '" + format + "' version");
}

json to_json(const ColumnSchema& s) {
  json j{{"feature_names", s.feature_names},
         {"target_name", s.target_name},
         {"target_kind", to_string(s.target_kind)}};
  if (s.target_kind == TargetKind::multiclass) j["n_classes"] = s.n_classes;
  j["timestamp_column"] = s.timestamp_column ? json(*s.timestamp_column) : json(nullptr);
  j["sensor_id_column"] = s.sensor_id_column ? json(*s.sensor_id_column) : json(nullptr);
  return j;
}

ColumnSchema schema_from_json(const json& j) {
  ColumnSchema s = guarded("schema", [&] {
    ColumnSchema s;
    s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    s.target_name = j.at("target_name").get<std::string>();
    s.target_kind = target_kind_from_string(j.at("target_kind").get<std::string>());
    s.n_classes = s.target_kind == TargetKind::binary       ? 2
                  : s.target_kind == TargetKind::multiclass ? j.at("n_classes").get<std::size_t>()
                                                            : 0;
    s.timestamp_column = optional_field<std::string>(j, "timestamp_column");
    s.sensor_id_column = optional_field<std::string>(j, "sensor_id_column");
    return s;
  });
  s.validate();
  return s;
}

json to_json(const ForestParams& p) {
  std::string mf = "all";
  if (p.max_features.kind == MaxFeatures::Kind::sqrt) mf = "sqrt";
  if (p.max_features.kind == MaxFeatures::Kind::fraction) mf = "fraction";
  json j{{"n_trees", p.n_trees},
         {"max_depth", p.max_depth ? json(*p.max_depth) : json(nullptr)},
         {"min_samples_split", p.min_samples_split},
         {"max_features", mf},
         {"bootstrap", p.bootstrap},
         {"seed", p.seed}};
  if (p.max_features.kind == MaxFeatures::Kind::fraction)
    j["max_features_fraction"] = p.max_features.fraction;
  return j;
}

ForestParams forest_params_from_json(const json& j) {
  ForestParams p = guarded("forest params", [&] {
    ForestParams p;
    p.n_trees = j.value("n_trees", p.n_trees);
    p.max_depth = optional_field<std::size_t>(j, "max_depth");
    p.min_samples_split = j.value("min_samples_split", p.min_samples_split);
    const std::string mf = j.value("max_features", std::string("all"));
    if (mf == "all") {
      p.max_features.kind = MaxFeatures::Kind::all;
    } else if (mf == "sqrt") {
      p.max_features.kind = MaxFeatures::Kind::sqrt;
    } else if (mf == "fraction") {
      p.max_features.kind = MaxFeatures::Kind::fraction;
      p.max_features.fraction = j.at("max_features_fraction").get<double>();
    } else {
      throw UsageError("InvalidForestParams", "unknown max_features '" + mf + "'");
    }
    p.bootstrap = j.value("bootstrap", p.bootstrap);
    p.seed = j.value("seed", p.seed);
    return p;
  });
  p.validate();
  return p;
}

json to_json(const Forest& f) {
  json trees = json::array();
  for (const auto& t : f.trees()) {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& n : t.nodes()) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      value.push_back(n.value);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"value", value}});
  }
  return {{"format", "cepuq.forest"},
          {"version", 1},
          {"params", to_json(f.params())},
          {"fingerprint",
           {{"rows", f.fingerprint().rows},
            {"features", f.fingerprint().features},
            {"seed", f.fingerprint().seed}}},
          {"trees", trees}};
}

Forest forest_from_json(const json& j) {
  require_format(j, "cepuq.forest", 1);
  return guarded("forest", [&] {
    const ForestParams params = forest_params_from_json(j.at("params"));
    const auto& fp = j.at("fingerprint");
    const TrainingFingerprint fingerprint{fp.at("rows").get<std::size_t>(),
                                          fp.at("features").get<std::size_t>(),
                                          fp.at("seed").get<std::uint64_t>()};
    std::vector<RegressionTree> trees;
    for (const auto& t : j.at("trees")) {
      const auto feature = t.at("feature").get<std::vector<int>>();
      const auto threshold = t.at("threshold").get<std::vector<double>>();
      const auto left = t.at("left").get<std::vector<int>>();
      const auto right = t.at("right").get<std::vector<int>>();
      const auto value = t.at("value").get<std::vector<double>>();
      const std::size_t n = feature.size();
      if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
          value.size() != n)
        invalid("tree arrays have inconsistent lengths");
      std::vector<RegressionTree::Node> nodes(n);
      for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = {feature[i], threshold[i], left[i], right[i], value[i]};
        if (feature[i] >= 0) {
          // Children are always appended after their parent, which rules out cycles.
          if (static_cast<std::size_t>(feature[i]) >= fingerprint.features ||
              left[i] <= static_cast<int>(i) || right[i] <= static_cast<int>(i) ||
              static_cast<std::size_t>(left[i]) >= n || static_cast<std::size_t>(right[i]) >= n)
            invalid("tree node references out of range");
        }
      }
      trees.emplace_back(std::move(nodes));
    }
    if (trees.size() != params.n_trees) invalid("tree count does not match n_trees");
    return Forest(std::move(trees), params, fingerprint);
  });
}

json to_json(const KnnModel& m) {
  return {{"format", "cepuq.knn"},
          {"version", 1},
          {"k", m.k()},
          {"scale", m.scaled()},
          {"n_features", m.n_features()},
          {"X_ref", matrix_rows(m.X_ref())},
          {"y_ref", m.y_ref()}};
}

KnnModel knn_from_json(const json& j) {
  require_format(j, "cepuq.knn", 1);
  return guarded("knn", [&] {
    Matrix X = matrix_from_rows(j.at("X_ref"), j.at("n_features").get<std::size_t>());
    return KnnModel(j.at("k").get<std::size_t>(), std::move(X),
                    j.at("y_ref").get<std::vector<double>>(), j.value("scale", false));
  });
}

json to_json(const IcpModel& m) {
  json j{{"format", "cepuq.icp"},
         {"version", 1},
         {"quantile_rule", to_string(m.quantile_rule())},
         {"underlying", to_json(m.underlying())},
         {"normalizer",
          {{"beta", m.normalizer().beta}, {"difficulty_model", to_json(m.normalizer().difficulty_model)}}}};
  j["calibration"] = m.calibration() ? json{{"scores", m.calibration()->scores()}} : json(nullptr);
  return j;
}

IcpModel icp_from_json(const json& j) {
  require_format(j, "cepuq.icp", 1);
  return guarded("icp", [&] {
    Forest forest = forest_from_json(j.at("underlying"));
    const auto& nj = j.at("normalizer");
    Normalizer normalizer{knn_from_json(nj.at("difficulty_model")), nj.at("beta").get<double>()};
    std::optional<CalibrationTable> cal;
    if (!j.at("calibration").is_null())
      cal = CalibrationTable(j.at("calibration").at("scores").get<std::vector<double>>());
    return IcpModel(std::move(forest), std::move(normalizer),
                    quantile_rule_from_string(j.at("quantile_rule").get<std::string>()),
                    std::move(cal));
  });
}

json to_json(const GaussianClassBaseline& m) {
  return {{"format", "cepuq.gaussian_class"},
          {"version", 1},
          {"n_features", m.means().cols()},
          {"means", matrix_rows(m.means())},
          {"stds", m.stds()}};
}

GaussianClassBaseline gaussian_baseline_from_json(const json& j) {
  require_format(j, "cepuq.gaussian_class", 1);
  return guarded("gaussian_class", [&] {
    return GaussianClassBaseline(
        matrix_from_rows(j.at("means"), j.at("n_features").get<std::size_t>()),
        j.at("stds").get<std::vector<double>>());
  });
}

json to_json(const WeightedMeanRegressor& m) {
  return {{"format", "cepuq.weighted_mean"},
          {"version", 1},
          {"means", m.means()},
          {"feature_stds", m.feature_stds()}};
}

WeightedMeanRegressor weighted_regressor_from_json(const json& j) {
  require_format(j, "cepuq.weighted_mean", 1);
  return guarded("weighted_mean", [&] {
    return WeightedMeanRegressor(j.at("means").get<std::vector<double>>(),
                                 j.at("feature_stds").get<std::vector<double>>());
  });
}

json to_json(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j{{"task", r.task}};
  const bool classification = r.accuracy.has_value() || r.counts.has_value();
  const bool regression = r.mae.has_value();
  if (classification) {
    j["accuracy"] = opt(r.accuracy);
    j["sensitivity"] = opt(r.sensitivity);
    j["specificity"] = opt(r.specificity);
    j["precision"] = opt(r.precision);
    j["recall"] = opt(r.recall);
    j["f_measure"] = opt(r.f_measure);
    if (r.counts)
      j["counts"] = {{"tp", r.counts->tp}, {"fn", r.counts->fn}, {"tn", r.counts->tn}, {"fp", r.counts->fp}};
  }
  if (regression) {
    j["r2"] = opt(r.r2);
    j["mae"] = opt(r.mae);
    j["mse"] = opt(r.mse);
    j["medae"] = opt(r.medae);
  }
  if (r.coverage) {
    j["coverage"] = opt(r.coverage);
    j["mean_width"] = opt(r.mean_width);
  }
  return j;
}

MetricsReport metrics_from_json(const json& j) {
  return guarded("metrics", [&] {
    MetricsReport r;
    r.task = j.value("task", std::string());
    r.accuracy = optional_field<double>(j, "accuracy");
    r.sensitivity = optional_field<double>(j, "sensitivity");
    r.specificity = optional_field<double>(j, "specificity");
    r.precision = optional_field<double>(j, "precision");
    r.recall = optional_field<double>(j, "recall");
    r.f_measure = optional_field<double>(j, "f_measure");
    if (j.contains("counts")) {
      const auto& c = j.at("counts");
      r.counts = ConfusionCounts{c.at("tp").get<std::size_t>(), c.at("fn").get<std::size_t>(),
                                 c.at("tn").get<std::size_t>(), c.at("fp").get<std::size_t>()};
    }
    r.r2 = optional_field<double>(j, "r2");
    r.mae = optional_field<double>(j, "mae");
    r.mse = optional_field<double>(j, "mse");
    r.medae = optional_field<double>(j, "medae");
    r.coverage = optional_field<double>(j, "coverage");
    r.mean_width = optional_field<double>(j, "mean_width");
    return r;
  });
}

json to_json(const SobolResult& r) {
  return {{"s1", r.s1},
          {"st", r.st},
          {"output_variance", r.output_variance},
          {"zero_variance", r.zero_variance}};
}

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::ml_cp:
      return "ml_cp";
    case ModelKind::npm:
      return "npm";
    case ModelKind::ipm:
      return "ipm";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "ml_cp") return ModelKind::ml_cp;
  if (s == "npm") return ModelKind::npm;
  if (s == "ipm") return ModelKind::ipm;
  invalid("unknown model_kind '" + s + "'");
}

json to_json(const ModelDocument& d) {
  json j{{"format", "cepuq.model"},
         {"version", kModelDocumentVersion},
         {"model_kind", to_string(d.kind)},
         {"schema", to_json(d.schema)},
         {"config_fingerprint", d.config_fingerprint},
         {"alpha", d.alpha}};
  j["class_thresholds"] = d.class_thresholds ? json(*d.class_thresholds) : json(nullptr);
  j["run_info"] = d.run_info;
  std::visit([&](const auto& m) { j["model"] = to_json(m); }, d.model);
  return j;
}

ModelDocument model_document_from_json(const json& j) {
  require_format(j, "cepuq.model", kModelDocumentVersion);
  return guarded("model document", [&] {
    ModelDocument d;
    d.kind = model_kind_from_string(j.at("model_kind").get<std::string>());
    d.schema = schema_from_json(j.at("schema"));
    d.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    d.alpha = j.at("alpha").get<double>();
    d.class_thresholds = optional_field<std::vector<double>>(j, "class_thresholds");
    d.run_info = j.value("run_info", json::object());
    const auto& m = j.at("model");
    const std::string format = m.at("format").get<std::string>();
    if (format == "cepuq.icp") {
      d.model = icp_from_json(m);
    } else if (format == "cepuq.gaussian_class") {
      d.model = gaussian_baseline_from_json(m);
    } else if (format == "cepuq.weighted_mean") {
      d.model = weighted_regressor_from_json(m);
    } else {
      invalid("unknown model payload '" + format + "'");
    }
    return d;
  });
}

}  // namespace cepuq
