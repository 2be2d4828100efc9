// Copyright 2026 The cepuq Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

namespace cepuq {

/// Versioned JSON document with published comparison numbers, keyed by
/// experiment ("binary", "multilevel", "regression", "fire") then model.
std::string_view reference_results_text() noexcept;

}  // namespace cepuq
