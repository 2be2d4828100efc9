// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cepuq/baselines.hpp"
#include "cepuq/conformal.hpp"
#include "cepuq/decision.hpp"
#include "cepuq/error.hpp"
#include "cepuq/reference_results.hpp"
#include "cepuq/rng.hpp"

namespace cepuq {

// ---------------------------------------------------------------------------
// Files

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("WriteFailed", "cannot write '" + path.string() + "'");
  out << text;
}

namespace {

json parse_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ModelError("InvalidJson", path.string() + ": " + e.what());
  }
}

void check_fingerprint(const std::string& expected, const std::string& actual,
                       const std::string& what) {
  if (expected != actual)
    throw ModelError("FingerprintMismatch", what + " was produced by config " + actual +
                                                ", current config is " + expected);
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::validate() const {
  if (data.generator != "traffic" && data.generator != "fire")
    throw UsageError("InvalidGenerator", "unknown generator '" + data.generator + "'");
  if (task != "binary" && task != "multilevel" && task != "regression")
    throw UsageError("InvalidTask", "unknown task '" + task + "'");
  if (!data.path) {
    if (data.n < 100) throw UsageError("TooFewRows", "generators need n >= 100");
    if (data.generator == "fire" && task != "binary")
      throw UsageError("InvalidTask", "the fire generator only supports the binary task");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("InvalidAlpha", "alpha must lie in (0, 1)");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw UsageError("InvalidSplit", "test_fraction must lie in (0, 1)");
  if (sobol.N < 2) throw UsageError("InvalidSampleSize", "sobol N must be >= 2");
  if (!(sobol.threshold >= 0.0 && sobol.threshold < 1.0))
    throw UsageError("InvalidThreshold", "sobol threshold must lie in [0, 1)");
  if (k < 1) throw UsageError("InvalidK", "k must be >= 1");
  if (!(beta > 0.0)) throw UsageError("InvalidBeta", "beta must be > 0");
  forest.validate();
  if (class_thresholds) ClassThresholds{*class_thresholds};
  if (data.schema) data.schema->validate();
}

RunConfig RunConfig::resolved() const {
  RunConfig c = *this;
  if (!c.seeds.data) c.seeds.data = derive_seed(seed, 1);
  if (!c.seeds.split) c.seeds.split = derive_seed(seed, 2);
  if (!c.seeds.forest) c.seeds.forest = derive_seed(seed, 3);
  if (!c.seeds.sobol) c.seeds.sobol = derive_seed(seed, 4);
  c.forest.seed = 0;
  return c;
}

std::uint64_t RunConfig::data_seed() const { return seeds.data.value_or(derive_seed(seed, 1)); }

SplitSpec RunConfig::split_spec() const {
  return {test_fraction, calibration_mode, seeds.split.value_or(derive_seed(seed, 2))};
}

ForestParams RunConfig::forest_params() const {
  ForestParams p = forest;
  p.seed = seeds.forest.value_or(derive_seed(seed, 3));
  return p;
}

std::uint64_t RunConfig::sobol_seed() const { return seeds.sobol.value_or(derive_seed(seed, 4)); }

TargetKind RunConfig::target_kind() const {
  if (task == "binary") return TargetKind::binary;
  if (task == "multilevel") return TargetKind::multiclass;
  return TargetKind::regression;
}

std::string RunConfig::reference_key() const {
  return !data.path && data.generator == "fire" ? "fire" : task;
}

namespace {

json optional_u64(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::uint64_t> read_optional_u64(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::uint64_t>();
}

}  // namespace

json to_json(const RunConfig& c) {
  json forest = to_json(c.forest);
  forest.erase("seed");
  json data{{"generator", c.data.generator},
            {"n", c.data.n},
            {"path", c.data.path ? json(*c.data.path) : json(nullptr)},
            {"schema", c.data.schema ? to_json(*c.data.schema) : json(nullptr)}};
  return {{"format", "cepuq.run_config"},
          {"version", 1},
          {"seed", c.seed},
          {"seeds",
           {{"data", optional_u64(c.seeds.data)},
            {"split", optional_u64(c.seeds.split)},
            {"forest", optional_u64(c.seeds.forest)},
            {"sobol", optional_u64(c.seeds.sobol)}}},
          {"data", data},
          {"task", c.task},
          {"alpha", c.alpha},
          {"quantile_rule", to_string(c.quantile_rule)},
          {"split",
           {{"test_fraction", c.test_fraction},
            {"calibration_mode",
             c.calibration_mode == CalibrationMode::even_split ? "even_split" : "none"}}},
          {"sobol", {{"N", c.sobol.N}, {"threshold", c.sobol.threshold}}},
          {"forest", forest},
          {"knn", {{"k", c.k}, {"scaling", c.knn_scaling}}},
          {"beta", c.beta},
          {"averaging", c.averaging == Averaging::micro ? "micro" : "macro"},
          {"class_thresholds", c.class_thresholds ? json(*c.class_thresholds) : json(nullptr)},
          {"output_dir", c.output_dir ? json(*c.output_dir) : json(nullptr)}};
}

RunConfig run_config_from_json(const json& j) {
  if (j.contains("format")) require_format(j, "cepuq.run_config", 1);
  RunConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      c.seeds.data = read_optional_u64(s, "data");
      c.seeds.split = read_optional_u64(s, "split");
      c.seeds.forest = read_optional_u64(s, "forest");
      c.seeds.sobol = read_optional_u64(s, "sobol");
    }
    if (j.contains("data")) {
      const auto& d = j.at("data");
      c.data.generator = d.value("generator", c.data.generator);
      c.data.n = d.value("n", c.data.n);
      if (d.contains("path") && !d.at("path").is_null()) c.data.path = d.at("path").get<std::string>();
      if (d.contains("schema") && !d.at("schema").is_null())
        c.data.schema = schema_from_json(d.at("schema"));
    }
    c.task = j.value("task", c.task);
    c.alpha = j.value("alpha", c.alpha);
    if (j.contains("quantile_rule"))
      c.quantile_rule = quantile_rule_from_string(j.at("quantile_rule").get<std::string>());
    if (j.contains("split")) {
      const auto& s = j.at("split");
      c.test_fraction = s.value("test_fraction", c.test_fraction);
      const std::string mode = s.value("calibration_mode", std::string("even_split"));
      if (mode != "even_split" && mode != "none")
        throw UsageError("InvalidSplit", "unknown calibration_mode '" + mode + "'");
      c.calibration_mode = mode == "none" ? CalibrationMode::none : CalibrationMode::even_split;
    }
    if (j.contains("sobol")) {
      c.sobol.N = j.at("sobol").value("N", c.sobol.N);
      c.sobol.threshold = j.at("sobol").value("threshold", c.sobol.threshold);
    }
    if (j.contains("forest")) {
      json f = j.at("forest");
      f.erase("seed");
      c.forest = forest_params_from_json(f);
    }
    if (j.contains("knn")) {
      c.k = j.at("knn").value("k", c.k);
      c.knn_scaling = j.at("knn").value("scaling", c.knn_scaling);
    }
    c.beta = j.value("beta", c.beta);
    const std::string avg = j.value("averaging", std::string("micro"));
    if (avg != "micro" && avg != "macro")
      throw UsageError("InvalidAveraging", "unknown averaging '" + avg + "'");
    c.averaging = avg == "macro" ? Averaging::macro : Averaging::micro;
    if (j.contains("class_thresholds") && !j.at("class_thresholds").is_null())
      c.class_thresholds = j.at("class_thresholds").get<std::vector<double>>();
    if (j.contains("output_dir") && !j.at("output_dir").is_null())
      c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw UsageError("InvalidConfig", std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return run_config_from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw UsageError("InvalidConfig", path.string() + ": " + e.what());
  }
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

std::string config_fingerprint(const RunConfig& c) {
  json j = to_json(c.resolved());
  j.erase("output_dir");
  j["data"].erase("path");
  return fnv1a_hex(j.dump());
}

std::string dataset_fingerprint(const Dataset& d) { return fnv1a_hex(to_csv(d)); }

namespace pipeline {

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".meta.json");
}

json run_info(const RunConfig& cfg) {
  const auto split = cfg.split_spec();
  return {{"alpha", cfg.alpha},
          {"seed", cfg.seed},
          {"split",
           {{"test_fraction", split.test_fraction},
            {"calibration_mode",
             split.calibration_mode == CalibrationMode::even_split ? "even_split" : "none"},
            {"seed", split.seed}}},
          {"reference_key", cfg.reference_key()}};
}

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    const std::string msg = std::string("stage '") + name + "': " + e.what();
    switch (e.category()) {
      case ErrorCategory::usage: throw UsageError(e.code(), msg);
      case ErrorCategory::data: throw DataError(e.code(), msg);
      case ErrorCategory::model: throw ModelError(e.code(), msg);
    }
    throw;
  }
}

}  // namespace

LoadedDataset load_dataset(const std::filesystem::path& csv,
                           const std::optional<ColumnSchema>& schema) {
  std::optional<ColumnSchema> use = schema;
  std::optional<std::string> fp;
  const auto meta_path = sidecar_path(csv);
  if (std::filesystem::exists(meta_path)) {
    const json meta = parse_json_file(meta_path);
    require_format(meta, "cepuq.dataset_meta", 1);
    if (!use) use = schema_from_json(meta.at("schema"));
    if (meta.contains("config_fingerprint") && !meta.at("config_fingerprint").is_null())
      fp = meta.at("config_fingerprint").get<std::string>();
  }
  if (!use)
    throw UsageError("MissingSchema", "no schema given and no sidecar '" + meta_path.string() + "'");
  return {load_csv(csv, *use), fp};
}

void save_dataset(const std::filesystem::path& csv, const Dataset& d,
                  const std::optional<std::string>& config_fp) {
  write_text_file(csv, to_csv(d));
  const json meta{{"format", "cepuq.dataset_meta"},
                  {"version", 1},
                  {"schema", to_json(d.schema)},
                  {"rows", d.size()},
                  {"dataset_fingerprint", dataset_fingerprint(d)},
                  {"config_fingerprint", config_fp ? json(*config_fp) : json(nullptr)}};
  write_text_file(sidecar_path(csv), meta.dump(2) + "\n");
}

void check_task(const RunConfig& cfg, const Dataset& d) {
  if (d.schema.target_kind != cfg.target_kind())
    throw ModelError("SchemaMismatch", "dataset target is " + to_string(d.schema.target_kind) +
                                           " but task is " + cfg.task);
}

Dataset acquire_dataset(const RunConfig& cfg) {
  cfg.validate();
  Dataset d;
  if (cfg.data.path) {
    auto loaded = load_dataset(*cfg.data.path, cfg.data.schema);
    if (loaded.config_fingerprint)
      check_fingerprint(config_fingerprint(cfg), *loaded.config_fingerprint, *cfg.data.path);
    d = std::move(loaded.data);
  } else if (cfg.data.generator == "fire") {
    d = generate_synthetic_fire(cfg.data.n, cfg.data_seed());
  } else {
    d = generate_synthetic_traffic(cfg.data.n, cfg.data_seed(),
                                   traffic_task_from_string(cfg.task));
  }
  check_task(cfg, d);
  return d;
}

SplitResult split(const RunConfig& cfg, const Dataset& d) { return split_three_way(d, cfg.split_spec()); }

// ---------------------------------------------------------------------------
// Sobol screening

SobolReport run_sobol(const RunConfig& cfg, const SplitResult& split) {
  const Dataset& train = split.train;
  const Forest surrogate = fit_forest(train.X, train.y, cfg.forest_params());
  SobolReport r;
  r.feature_names = train.schema.feature_names;
  r.ranges = InputRange::from_data(train.X);
  r.N = cfg.sobol.N;
  r.seed = cfg.sobol_seed();
  r.threshold = cfg.sobol.threshold;
  const auto sample = saltelli_sample(r.ranges, r.N, r.seed);
  r.result = estimate_indices([&](std::span<const double> x) { return surrogate.predict(x); }, sample);
  r.selected = select_features(r.result, r.threshold);
  r.config_fingerprint = config_fingerprint(cfg);
  return r;
}

json to_json(const SobolReport& r) {
  json features = json::array();
  for (std::size_t i = 0; i < r.feature_names.size(); ++i)
    features.push_back({{"name", r.feature_names[i]},
                        {"s1", r.result.s1[i]},
                        {"st", r.result.st[i]},
                        {"lower", r.ranges.lower[i]},
                        {"upper", r.ranges.upper[i]}});
  std::vector<std::string> selected_names;
  for (std::size_t i : r.selected) selected_names.push_back(r.feature_names[i]);
  return {{"format", "cepuq.sobol_report"},
          {"version", 1},
          {"config_fingerprint", r.config_fingerprint},
          {"input_distribution", "independent uniform over training min/max"},
          {"N", r.N},
          {"seed", r.seed},
          {"evaluations", r.N * (r.feature_names.size() + 2)},
          {"threshold", r.threshold},
          {"output_variance", r.result.output_variance},
          {"zero_variance", r.result.zero_variance},
          {"features", features},
          {"selected", r.selected},
          {"selected_names", selected_names}};
}

SobolReport sobol_report_from_json(const json& j) {
  require_format(j, "cepuq.sobol_report", 1);
  try {
    SobolReport r;
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.N = j.at("N").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.threshold = j.at("threshold").get<double>();
    r.result.output_variance = j.at("output_variance").get<double>();
    r.result.zero_variance = j.at("zero_variance").get<bool>();
    for (const auto& f : j.at("features")) {
      r.feature_names.push_back(f.at("name").get<std::string>());
      r.result.s1.push_back(f.at("s1").get<double>());
      r.result.st.push_back(f.at("st").get<double>());
      r.ranges.lower.push_back(f.at("lower").get<double>());
      r.ranges.upper.push_back(f.at("upper").get<double>());
    }
    r.selected = j.at("selected").get<std::vector<std::size_t>>();
    for (std::size_t i : r.selected)
      if (i >= r.feature_names.size()) throw ModelError("InvalidModelDocument", "selected index out of range");
    return r;
  } catch (const json::exception& e) {
    throw ModelError("InvalidModelDocument", std::string("sobol report: ") + e.what());
  }
}

std::string sobol_tsv(const SobolReport& r) {
  std::string out = "feature\ts1\tst\n";
  for (std::size_t i = 0; i < r.feature_names.size(); ++i)
    out += r.feature_names[i] + '\t' + format_real(r.result.s1[i]) + '\t' +
           format_real(r.result.st[i]) + '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Training

ModelDocument train_ml_cp(const RunConfig& cfg, const SplitResult& split,
                          const std::vector<std::size_t>& selected) {
  if (!split.calibrate || split.calibrate->size() == 0)
    throw DataError("EmptyCalibrationSet", "ml_cp needs a calibration partition (calibration_mode = even_split)");
  const Dataset train = split.train.select_features(selected);
  const Dataset cal = split.calibrate->select_features(selected);

  IcpOptions options;
  options.forest = cfg.forest_params();
  options.k = cfg.k;
  options.beta = cfg.beta;
  options.rule = cfg.quantile_rule;
  options.scale_knn = cfg.knn_scaling;

  ModelDocument doc;
  doc.kind = ModelKind::ml_cp;
  doc.schema = train.schema;
  doc.config_fingerprint = config_fingerprint(cfg);
  doc.alpha = cfg.alpha;
  doc.run_info = run_info(cfg);
  if (train.schema.target_kind == TargetKind::multiclass)
    doc.class_thresholds = cfg.class_thresholds
                               ? *cfg.class_thresholds
                               : ClassThresholds::midpoints(train.schema.n_classes).bounds();
  if (doc.class_thresholds && doc.class_thresholds->size() + 1 != train.schema.n_classes)
    throw UsageError("InvalidThresholds", "class_thresholds must have n_classes - 1 entries");
  doc.model = calibrate_icp(fit_icp(train, options), cal);
  return doc;
}

namespace {

Dataset non_test_rows(const SplitResult& split) {
  if (!split.calibrate) return split.train;
  std::vector<std::size_t> rows(split.train.size() + split.calibrate->size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Dataset all = split.train;
  Matrix X(rows.size(), all.n_features());
  std::vector<double> y;
  for (std::size_t r = 0; r < split.train.size(); ++r) {
    std::copy(split.train.X.row(r).begin(), split.train.X.row(r).end(), X.row(r).begin());
    y.push_back(split.train.y[r]);
  }
  for (std::size_t r = 0; r < split.calibrate->size(); ++r) {
    const auto src = split.calibrate->X.row(r);
    std::copy(src.begin(), src.end(), X.row(split.train.size() + r).begin());
    y.push_back(split.calibrate->y[r]);
  }
  all.X = std::move(X);
  all.y = std::move(y);
  return all;
}

// IPM stds, with NPM's unit std substituted for any constant feature.
std::vector<double> ipm_stds_with_fallback(const Dataset& d) {
  try {
    return derive_ipm_stds(d);
  } catch (const DataError& e) {
    if (e.code() != "ZeroStd") throw;
  }
  std::vector<double> out;
  for (std::size_t f = 0; f < d.n_features(); ++f) {
    Dataset one = d.select_features({f});
    try {
      out.push_back(derive_ipm_stds(one).front());
    } catch (const DataError& e) {
      if (e.code() != "ZeroStd") throw;
      out.push_back(1.0);
    }
  }
  return out;
}

}  // namespace

ModelDocument train_baseline(const RunConfig& cfg, const SplitResult& split, ModelKind kind) {
  if (kind == ModelKind::ml_cp) throw UsageError("InvalidModelKind", "ml_cp is not a baseline");
  const Dataset fit = non_test_rows(split);
  std::vector<double> stds =
      kind == ModelKind::npm ? npm_stds(fit.n_features()) : ipm_stds_with_fallback(fit);

  ModelDocument doc;
  doc.kind = kind;
  doc.schema = fit.schema;
  doc.config_fingerprint = config_fingerprint(cfg);
  doc.alpha = cfg.alpha;
  doc.run_info = run_info(cfg);
  if (fit.schema.is_classification())
    doc.model = fit_gaussian_classifier(fit.X, fit.y, fit.schema.class_count(), std::move(stds));
  else
    doc.model = fit_weighted_regressor(fit.X, fit.y, std::move(stds));
  return doc;
}

// ---------------------------------------------------------------------------
// Prediction

PredictionTable predict(const ModelDocument& model, const Dataset& data) {
  if (data.schema.target_kind != model.schema.target_kind)
    throw ModelError("SchemaMismatch", "model predicts " + to_string(model.schema.target_kind) +
                                           ", dataset target is " + to_string(data.schema.target_kind));
  std::vector<std::size_t> columns;
  for (const auto& name : model.schema.feature_names) {
    const auto idx = data.schema.feature_index(name);
    if (!idx) throw ModelError("SchemaMismatch", "dataset lacks model feature '" + name + "'");
    columns.push_back(*idx);
  }
  const Dataset view = data.select_features(columns);

  PredictionTable t;
  t.kind = model.kind;
  t.target = model.schema.target_kind;
  t.config_fingerprint = model.config_fingerprint;
  t.run_info = model.run_info;
  t.rows.reserve(view.size());

  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        for (std::size_t r = 0; r < view.size(); ++r) {
          const auto x = view.X.row(r);
          PredictionRow row;
          row.row_id = r;
          if constexpr (std::is_same_v<M, IcpModel>) {
            const PredictionInterval p = m.predict_interval(x, model.alpha);
            row.lo = p.lo;
            row.hi = p.hi;
            const double mean = interval_mean(p);
            if (t.target == TargetKind::binary) {
              const auto d = binary_decision(mean);
              row.output = d.label;
              row.auxiliary = d.confidence;
            } else if (t.target == TargetKind::multiclass) {
              const auto d = multiclass_decision(mean, ClassThresholds(model.class_thresholds.value()));
              row.output = d.label;
              row.auxiliary = d.confidence;
            } else {
              const auto d = regression_decision(p);
              row.output = d.value;
              row.auxiliary = d.width;
            }
          } else if constexpr (std::is_same_v<M, GaussianClassBaseline>) {
            row.output = m.predict(x);
          } else {
            row.output = m.predict(x);
          }
          t.rows.push_back(row);
        }
      },
      model.model);
  return t;
}

namespace {

std::string optional_cell(const std::optional<double>& v) { return v ? format_real(*v) : ""; }

}  // namespace

std::string to_csv(const PredictionTable& t) {
  const json header{{"format", "cepuq.predictions"},
                    {"version", 1},
                    {"model_kind", to_string(t.kind)},
                    {"target_kind", to_string(t.target)},
                    {"config_fingerprint", t.config_fingerprint},
                    {"run_info", t.run_info}};
  const bool regression = t.target == TargetKind::regression;
  std::string out = "# " + header.dump() + "\n";
  out += regression ? "row_id,value,width,lo,hi\n" : "row_id,label,confidence,lo,hi\n";
  for (const auto& r : t.rows)
    out += std::to_string(r.row_id) + ',' + format_real(r.output) + ',' + optional_cell(r.auxiliary) +
           ',' + optional_cell(r.lo) + ',' + optional_cell(r.hi) + '\n';
  return out;
}

PredictionTable parse_predictions(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw ModelError("InvalidModelDocument", "predictions file lacks its header comment");
  PredictionTable t;
  try {
    const json header = json::parse(line.substr(2));
    require_format(header, "cepuq.predictions", 1);
    t.kind = model_kind_from_string(header.at("model_kind").get<std::string>());
    t.target = target_kind_from_string(header.at("target_kind").get<std::string>());
    t.config_fingerprint = header.at("config_fingerprint").get<std::string>();
    t.run_info = header.value("run_info", json::object());
  } catch (const json::exception& e) {
    throw ModelError("InvalidModelDocument", std::string("predictions header: ") + e.what());
  }
  std::getline(in, line);  // column header
  auto cell = [](const std::string& s, std::size_t row) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw NonNumericCell(row, "predictions", s);
    return v;
  };
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    while (f.size() < 5) f.emplace_back();
    PredictionRow r;
    r.row_id = static_cast<std::size_t>(cell(f[0], row).value_or(static_cast<double>(row)));
    const auto out = cell(f[1], row);
    if (!out) throw NonNumericCell(row, "output", "");
    r.output = *out;
    r.auxiliary = cell(f[2], row);
    r.lo = cell(f[3], row);
    r.hi = cell(f[4], row);
    t.rows.push_back(r);
    ++row;
  }
  return t;
}

PredictionTable load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_text_file(path));
}

// ---------------------------------------------------------------------------
// Evaluation

json evaluate(const PredictionTable& p, const Dataset& truth, Averaging averaging, bool compare) {
  if (p.rows.size() != truth.size())
    throw DataError("LengthMismatch", "predictions have " + std::to_string(p.rows.size()) +
                                          " rows, truth has " + std::to_string(truth.size()));
  if (truth.schema.target_kind != p.target)
    throw ModelError("SchemaMismatch", "truth target kind differs from predictions");

  std::vector<double> y_true(p.rows.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    if (p.rows[i].row_id >= truth.size())
      throw DataError("LengthMismatch", "prediction row_id beyond truth rows");
    y_true[i] = truth.y[p.rows[i].row_id];
  }

  MetricsReport report;
  if (p.target == TargetKind::regression) {
    std::vector<double> y_pred;
    for (const auto& r : p.rows) y_pred.push_back(r.output);
    report = regression_metrics(y_true, y_pred);
  } else {
    std::vector<int> t, q;
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
      t.push_back(static_cast<int>(y_true[i]));
      q.push_back(static_cast<int>(p.rows[i].output));
    }
    report = classification_metrics(t, q, truth.schema.class_count(), averaging);
    report.task = p.target == TargetKind::binary ? "binary" : "multiclass";
  }
  std::vector<PredictionInterval> intervals;
  std::vector<double> covered_truth;
  for (std::size_t i = 0; i < p.rows.size(); ++i)
    if (p.rows[i].lo && p.rows[i].hi) {
      intervals.push_back({*p.rows[i].lo, *p.rows[i].hi, 0.0});
      covered_truth.push_back(y_true[i]);
    }
  if (!intervals.empty() && intervals.size() == p.rows.size())
    report.merge(interval_metrics(intervals, covered_truth));

  json info = p.run_info;
  json doc{{"format", "cepuq.metrics"},
           {"version", 1},
           {"model_kind", to_string(p.kind)},
           {"task", report.task},
           {"metrics", to_json(report)},
           {"config",
            {{"alpha", info.value("alpha", json(nullptr))},
             {"seed", info.value("seed", json(nullptr))},
             {"split", info.value("split", json(nullptr))},
             {"averaging", averaging == Averaging::micro ? "micro" : "macro"}}},
           {"config_fingerprint", p.config_fingerprint},
           {"dataset_fingerprint", dataset_fingerprint(truth)}};
  if (compare) {
    const json refs = json::parse(reference_results_text());
    const std::string key = info.value("reference_key", std::string());
    doc["compare"] = refs.contains(key) ? json{{"reference_key", key},
                                               {"reference_version", refs.at("version")},
                                               {"published", refs.at(key)}}
                                        : json(nullptr);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Full experiment

json run_experiment(const RunConfig& input, const std::filesystem::path& out_dir) {
  const RunConfig cfg = input.resolved();
  stage("config", [&] { cfg.validate(); });
  const std::string fp = config_fingerprint(cfg);
  std::filesystem::create_directories(out_dir);

  RunConfig snapshot = cfg;
  snapshot.output_dir.reset();
  write_text_file(out_dir / "config.json", to_json(snapshot).dump(2) + "\n");

  const Dataset data = stage("generate", [&] { return acquire_dataset(cfg); });
  stage("generate", [&] { save_dataset(out_dir / "data.csv", data, fp); });

  const SplitResult parts = stage("split", [&] { return split(cfg, data); });
  stage("split", [&] { save_dataset(out_dir / "test.csv", parts.test, fp); });

  const SobolReport sobol = stage("sobol", [&] { return run_sobol(cfg, parts); });
  stage("sobol", [&] {
    write_text_file(out_dir / "sobol.json", to_json(sobol).dump(2) + "\n");
    write_text_file(out_dir / "sobol.tsv", sobol_tsv(sobol));
  });

  json models = json::object();
  for (const ModelKind kind : {ModelKind::ml_cp, ModelKind::npm, ModelKind::ipm}) {
    const std::string name = to_string(kind);
    const ModelDocument doc = stage("train", [&] {
      return kind == ModelKind::ml_cp ? train_ml_cp(cfg, parts, sobol.selected)
                                      : train_baseline(cfg, parts, kind);
    });
    stage("train", [&] { write_text_file(out_dir / ("model_" + name + ".json"), to_json(doc).dump() + "\n"); });

    const PredictionTable preds = stage("predict", [&] { return predict(doc, parts.test); });
    stage("predict", [&] { write_text_file(out_dir / ("predictions_" + name + ".csv"), to_csv(preds)); });

    const json metrics = stage("evaluate", [&] { return evaluate(preds, parts.test, cfg.averaging, false); });
    stage("evaluate", [&] { write_text_file(out_dir / ("metrics_" + name + ".json"), metrics.dump(2) + "\n"); });
    models[name] = metrics.at("metrics");
  }

  const bool regression = cfg.target_kind() == TargetKind::regression;
  const std::string primary = regression ? "r2" : "accuracy";
  auto score = [&](const char* m) {
    const auto& v = models.at(m).at(primary);
    return v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>();
  };
  std::vector<std::string> selected_names;
  for (std::size_t i : sobol.selected) selected_names.push_back(sobol.feature_names[i]);

  const json refs = json::parse(reference_results_text());
  const std::string key = cfg.reference_key();
  json summary{{"format", "cepuq.summary"},
               {"version", 1},
               {"config_fingerprint", fp},
               {"dataset_fingerprint", dataset_fingerprint(data)},
               {"task", cfg.task},
               {"rows", {{"total", data.size()},
                         {"train", parts.train.size()},
                         {"calibrate", parts.calibrate ? parts.calibrate->size() : 0},
                         {"test", parts.test.size()}}},
               {"alpha", cfg.alpha},
               {"selected_features", selected_names},
               {"sobol", {{"s1", sobol.result.s1}, {"st", sobol.result.st}, {"features", sobol.feature_names}}},
               {"models", models},
               {"ordering",
                {{"metric", primary},
                 {"ml_cp_dominates", score("ml_cp") > score("npm") && score("ml_cp") > score("ipm")}}},
               {"reference", refs.contains(key) ? refs.at(key) : json(nullptr)}};
  write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
  write_text_file(out_dir / "summary.txt", render_summary(summary));
  return summary;
}

std::string render_summary(const json& summary) {
  std::ostringstream out;
  out << "task: " << summary.at("task").get<std::string>()
      << "   config: " << summary.at("config_fingerprint").get<std::string>() << "\n";
  out << "selected features:";
  for (const auto& f : summary.at("selected_features")) out << ' ' << f.get<std::string>();
  out << "\n\n";

  const json& models = summary.at("models");
  std::vector<std::string> metrics;
  for (const auto& [key, value] : models.at("ml_cp").items())
    if (value.is_number() || value.is_null()) metrics.push_back(key);

  out << std::left << std::setw(14) << "metric";
  for (const char* m : {"ml_cp", "npm", "ipm"}) out << std::setw(14) << m;
  out << "\n";
  for (const auto& metric : metrics) {
    out << std::setw(14) << metric;
    for (const char* m : {"ml_cp", "npm", "ipm"}) {
      const json& v = models.at(m).contains(metric) ? models.at(m).at(metric) : json(nullptr);
      std::ostringstream cell;
      if (v.is_number()) cell << std::setprecision(4) << v.get<double>();
      else cell << "-";
      out << std::setw(14) << cell.str();
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace pipeline
}  // namespace cepuq
