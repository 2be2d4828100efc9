// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#include "cepuq/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "cepuq/error.hpp"

namespace cepuq {

std::string to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::binary:
      return "binary";
    case TargetKind::multiclass:
      return "multiclass";
    case TargetKind::regression:
      return "regression";
  }
  return "unknown";
}

TargetKind target_kind_from_string(const std::string& text) {
  if (text == "binary") return TargetKind::binary;
  if (text == "multiclass") return TargetKind::multiclass;
  if (text == "regression") return TargetKind::regression;
  throw UsageError("InvalidTargetKind", "unknown target kind '" + text + "'");
}

void ColumnSchema::validate() const {
  if (feature_names.empty()) throw UsageError("InvalidSchema", "schema has no features");
  std::set<std::string> seen;
  for (const auto& name : feature_names) {
    if (name.empty()) throw UsageError("InvalidSchema", "empty feature name");
    if (!seen.insert(name).second)
      throw UsageError("InvalidSchema", "duplicate feature '" + name + "'");
  }
  if (target_name.empty()) throw UsageError("InvalidSchema", "empty target name");
  if (seen.contains(target_name))
    throw UsageError("InvalidSchema", "target '" + target_name + "' is also a feature");
  if (target_kind == TargetKind::multiclass && n_classes < 2)
    throw UsageError("InvalidSchema", "multiclass schema needs at least 2 classes");
}

std::size_t ColumnSchema::class_count() const noexcept {
  switch (target_kind) {
    case TargetKind::binary:
      return 2;
    case TargetKind::multiclass:
      return n_classes;
    case TargetKind::regression:
      return 0;
  }
  return 0;
}

std::optional<std::size_t> ColumnSchema::feature_index(const std::string& name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

void Dataset::validate() const {
  if (X.rows() != y.size())
    throw DataError("ShapeMismatch", "feature rows (" + std::to_string(X.rows()) +
                                         ") != targets (" + std::to_string(y.size()) + ")");
  if (X.cols() != schema.feature_names.size())
    throw DataError("ShapeMismatch", "feature columns do not match schema");
  for (double v : X.data())
    if (!std::isfinite(v)) throw DataError("NonFiniteInput", "non-finite feature value");
  const std::size_t classes = schema.class_count();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = y[i];
    if (!std::isfinite(v)) throw DataError("NonFiniteInput", "non-finite target value");
    if (schema.is_classification() &&
        (v < 0 || v != std::floor(v) || v >= static_cast<double>(classes)))
      throw DataError("InvalidLabel", "label " + format_real(v) + " at row " +
                                          std::to_string(i) + " outside class set");
  }
}

Dataset Dataset::subset_rows(const std::vector<std::size_t>& rows) const {
  Dataset out{schema, Matrix(rows.size(), X.cols()), std::vector<double>(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = X.row(rows[i]);
    std::copy(src.begin(), src.end(), out.X.row(i).begin());
    out.y[i] = y[rows[i]];
  }
  return out;
}

Dataset Dataset::select_features(const std::vector<std::size_t>& features) const {
  Dataset out{schema, Matrix(X.rows(), features.size()), y};
  out.schema.feature_names.clear();
  for (std::size_t f : features) {
    if (f >= X.cols()) throw DimensionMismatch(X.cols(), f + 1);
    out.schema.feature_names.push_back(schema.feature_names[f]);
  }
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t j = 0; j < features.size(); ++j) out.X(r, j) = X(r, features[j]);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_real(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

}  // namespace

Dataset parse_csv(const std::string& text, const ColumnSchema& schema) {
  schema.validate();
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      const std::string_view line = rest.substr(0, nl);
      if (!trim(line).empty() && trim(line).front() != '#') lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty()) throw DataError("EmptyDataset", "CSV has no header row");

  const auto header = split_fields(lines.front());
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(std::string(header[i]), i);
  auto locate = [&](const std::string& name) {
    const auto it = position.find(name);
    if (it == position.end()) throw MissingColumn(name);
    return it->second;
  };
  std::vector<std::size_t> feature_pos;
  for (const auto& name : schema.feature_names) feature_pos.push_back(locate(name));
  const std::size_t target_pos = locate(schema.target_name);
  if (schema.timestamp_column) locate(*schema.timestamp_column);
  if (schema.sensor_id_column) locate(*schema.sensor_id_column);

  const std::size_t rows = lines.size() - 1;
  if (rows == 0) throw DataError("EmptyDataset", "CSV has no data rows");

  Dataset d{schema, Matrix(rows, schema.feature_names.size()), std::vector<double>(rows)};
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    auto cell = [&](std::size_t pos, const std::string& name) {
      const std::string_view raw = pos < fields.size() ? fields[pos] : std::string_view{};
      const auto v = parse_real(raw);
      if (!v) throw NonNumericCell(r, name, std::string(raw));
      return *v;
    };
    for (std::size_t j = 0; j < feature_pos.size(); ++j)
      d.X(r, j) = cell(feature_pos[j], schema.feature_names[j]);
    d.y[r] = cell(target_pos, schema.target_name);
  }
  d.validate();
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("FileNotFound", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema);
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const Dataset& d) {
  std::string out;
  for (const auto& name : d.schema.feature_names) out += name + ',';
  out += d.schema.target_name + '\n';
  for (std::size_t r = 0; r < d.size(); ++r) {
    for (double v : d.X.row(r)) out += format_real(v) + ',';
    out += format_real(d.y[r]) + '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("WriteFailed", "cannot write '" + path.string() + "'");
  out << to_csv(d);
}

// ---------------------------------------------------------------------------
// Splitting

SplitResult split_three_way(const Dataset& d, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw UsageError("InvalidSplit", "test_fraction must lie in (0, 1)");
  const std::size_t n = d.size();
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.test_fraction));
  const std::size_t n_cal =
      spec.calibration_mode == CalibrationMode::even_split ? (n - std::min(n, n_test)) / 2 : 0;
  if (n_test == 0 || n_test >= n || n - n_test - n_cal == 0 ||
      (spec.calibration_mode == CalibrationMode::even_split && n_cal == 0))
    throw DataError("PartitionTooSmall",
                    "split of " + std::to_string(n) + " rows leaves an empty partition");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(spec.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  SplitResult out;
  out.test_rows.assign(perm.begin(), perm.begin() + n_test);
  out.calibrate_rows.assign(perm.begin() + n_test, perm.begin() + n_test + n_cal);
  out.train_rows.assign(perm.begin() + n_test + n_cal, perm.end());
  out.train = d.subset_rows(out.train_rows);
  out.test = d.subset_rows(out.test_rows);
  if (spec.calibration_mode == CalibrationMode::even_split)
    out.calibrate = d.subset_rows(out.calibrate_rows);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generators

std::string to_string(TrafficTask task) {
  switch (task) {
    case TrafficTask::binary:
      return "binary";
    case TrafficTask::multilevel:
      return "multilevel";
    case TrafficTask::regression:
      return "regression";
  }
  return "unknown";
}

TrafficTask traffic_task_from_string(const std::string& text) {
  if (text == "binary") return TrafficTask::binary;
  if (text == "multilevel") return TrafficTask::multilevel;
  if (text == "regression") return TrafficTask::regression;
  throw UsageError("InvalidTask", "unknown traffic task '" + text + "'");
}

int congestion_level(double jam_length_m) noexcept {
  if (jam_length_m <= 0.0) return 0;
  if (jam_length_m <= kLightJamMaxMeters) return 1;
  if (jam_length_m <= kModerateJamMaxMeters) return 2;
  return 3;
}

ColumnSchema traffic_schema(TrafficTask task) {
  ColumnSchema s;
  s.feature_names = {"speed", "flow", "occupancy", "halting_duration"};
  switch (task) {
    case TrafficTask::binary:
      s.target_name = "congestion";
      s.target_kind = TargetKind::binary;
      s.n_classes = 2;
      break;
    case TrafficTask::multilevel:
      s.target_name = "congestion_level";
      s.target_kind = TargetKind::multiclass;
      s.n_classes = 4;
      break;
    case TrafficTask::regression:
      s.target_name = "jam_length_m";
      s.target_kind = TargetKind::regression;
      break;
  }
  return s;
}

ColumnSchema fire_schema() {
  ColumnSchema s;
  s.feature_names = {"temperature", "smoke", "flame"};
  s.target_name = "fire";
  s.target_kind = TargetKind::binary;
  s.n_classes = 2;
  return s;
}

namespace {

void require_min_rows(std::size_t n) {
  if (n < 100) throw UsageError("TooFewRows", "generators need n >= 100");
}

}  // namespace

Dataset generate_synthetic_traffic(std::size_t n, std::uint64_t seed, TrafficTask task) {
  require_min_rows(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset d{traffic_schema(task), Matrix(n, 4), std::vector<double>(n)};
  for (std::size_t r = 0; r < n; ++r) {
    const double c = unit(rng);
    // Free flow (c <= 0.3) has no queue at all; sensor noise only perturbs a real one.
    const double jam_noise = 3.0 * gauss(rng);
    const double jam =
        c > 0.3 ? std::clamp(kMaxJamMeters * (c - 0.3) / 0.7 + jam_noise, 0.0, kMaxJamMeters) : 0.0;
    const double speed = std::max(0.0, 14.0 * (1.0 - c) + 0.5 * gauss(rng));
    // Flow climbs with density, peaks near c = 0.4 and sags slightly once jammed.
    const double flow =
        std::max(0.0, 30.0 * (1.0 - std::exp(-5.0 * c)) - 6.0 * c * c + 1.0 * gauss(rng));
    const double occupancy = std::clamp(90.0 * c + 2.0 * gauss(rng), 0.0, 100.0);
    const double halting = std::max(0.0, 60.0 * c * c + 1.5 * gauss(rng));

    d.X(r, 0) = speed;
    d.X(r, 1) = flow;
    d.X(r, 2) = occupancy;
    d.X(r, 3) = halting;
    switch (task) {
      case TrafficTask::binary:
        d.y[r] = jam > 0.0 ? 1.0 : 0.0;
        break;
      case TrafficTask::multilevel:
        d.y[r] = congestion_level(jam);
        break;
      case TrafficTask::regression:
        d.y[r] = jam;
        break;
    }
  }
  return d;
}

int fire_label(double temperature, double smoke) noexcept {
  const double heat = (temperature - kAmbientTemperature) / 18.0;
  const double haze = (smoke - kAmbientSmoke) / 220.0;
  return heat + haze > 1.0 ? 1 : 0;
}

Dataset generate_synthetic_fire(std::size_t n, std::uint64_t seed) {
  require_min_rows(n);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution burning(0.35);
  std::bernoulli_distribution flicker(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset d{fire_schema(), Matrix(n, 3), std::vector<double>(n)};
  for (std::size_t r = 0; r < n; ++r) {
    const double fire = burning(rng) ? 1.0 : 0.0;
    const double temperature = kAmbientTemperature + 18.0 * fire + 5.0 * gauss(rng);
    const double smoke = std::max(0.0, kAmbientSmoke + 220.0 * fire + 60.0 * gauss(rng));
    // The flame channel is an independent digital flicker that carries no signal.
    const double flame = flicker(rng) ? 1.0 : 0.0;
    d.X(r, 0) = temperature;
    d.X(r, 1) = smoke;
    d.X(r, 2) = flame;
    d.y[r] = fire_label(temperature, smoke);
  }
  return d;
}

}  // namespace cepuq
