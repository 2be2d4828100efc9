// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON forms of fitted models and reports. Every document carries a "format"
// tag and integer "version"; readers reject anything they do not know with
// ModelError("InvalidModelDocument").

#include <json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cepuq/baselines.hpp"
#include "cepuq/conformal.hpp"
#include "cepuq/dataset.hpp"
#include "cepuq/decision.hpp"
#include "cepuq/forest.hpp"
#include "cepuq/knn.hpp"
#include "cepuq/metrics.hpp"
#include "cepuq/sobol.hpp"

namespace cepuq {

using json = nlohmann::json;

inline constexpr int kModelDocumentVersion = 1;

json to_json(const ColumnSchema& s);
ColumnSchema schema_from_json(const json& j);

json to_json(const ForestParams& p);
ForestParams forest_params_from_json(const json& j);

json to_json(const Forest& f);
Forest forest_from_json(const json& j);

json to_json(const KnnModel& m);
KnnModel knn_from_json(const json& j);

json to_json(const IcpModel& m);
IcpModel icp_from_json(const json& j);

json to_json(const GaussianClassBaseline& m);
GaussianClassBaseline gaussian_baseline_from_json(const json& j);

json to_json(const WeightedMeanRegressor& m);
WeightedMeanRegressor weighted_regressor_from_json(const json& j);

/// Optional ratios serialize as null when undefined.
json to_json(const MetricsReport& r);
MetricsReport metrics_from_json(const json& j);

json to_json(const SobolResult& r);

enum class ModelKind { ml_cp, npm, ipm };
std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

/// Everything `predict` needs: which columns to read and how to decide.
struct ModelDocument {
  ModelKind kind = ModelKind::ml_cp;
  /// Schema of the training data *after* feature selection.
  ColumnSchema schema;
  std::string config_fingerprint;
  double alpha = 0.03;
  std::optional<std::vector<double>> class_thresholds;
  /// Excerpt of the producing config ({alpha, seed, split, reference_key}).
  json run_info = json::object();
  std::variant<IcpModel, GaussianClassBaseline, WeightedMeanRegressor> model;
};

json to_json(const ModelDocument& d);
ModelDocument model_document_from_json(const json& j);

/// Throws ModelError("InvalidModelDocument") unless j["format"] == format and
/// j["version"] <= version.
void require_format(const json& j, const std::string& format, int version);

}  // namespace cepuq
