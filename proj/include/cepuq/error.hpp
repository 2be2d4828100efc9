// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cepuq {

/// Broad failure category. The CLI maps each category onto an exit code.
enum class ErrorCategory {
  usage,  // exit 2
  data,   // exit 3
  model,  // exit 4
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string code, const std::string& message)
      : std::runtime_error(message), category_(category), code_(std::move(code)) {}

  ErrorCategory category() const noexcept { return category_; }
  /// Short machine-readable identifier, e.g. "MissingColumn".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorCategory category_;
  std::string code_;
};

class UsageError : public Error {
 public:
  UsageError(std::string code, const std::string& message)
      : Error(ErrorCategory::usage, std::move(code), message) {}
};

class DataError : public Error {
 public:
  DataError(std::string code, const std::string& message)
      : Error(ErrorCategory::data, std::move(code), message) {}
};

class ModelError : public Error {
 public:
  ModelError(std::string code, const std::string& message)
      : Error(ErrorCategory::model, std::move(code), message) {}
};

class MissingColumn : public DataError {
 public:
  explicit MissingColumn(const std::string& name)
      : DataError("MissingColumn", "missing column '" + name + "'"), column_(name) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

/// A schema cell that is empty, unparsable, or non-finite. `row` is the
/// 0-based data row (header excluded).
class NonNumericCell : public DataError {
 public:
  NonNumericCell(std::size_t row, const std::string& column, const std::string& text)
      : DataError("NonNumericCell", "non-numeric cell '" + text + "' at row " +
                                        std::to_string(row) + ", column '" + column + "'"),
        row_(row),
        column_(column) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class DimensionMismatch : public ModelError {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : ModelError("DimensionMismatch", "expected " + std::to_string(expected) +
                                            " features, got " + std::to_string(actual)) {}
};

}  // namespace cepuq
