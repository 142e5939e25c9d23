// Copyright 2026 The semiprop Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "semiprop/verification.hpp"

namespace semiprop {

inline constexpr const char* kSchema = "semiprop/1";

nlohmann::json to_json(const Vec& v);
/// Row-major nested arrays.
nlohmann::json to_json(const Mat& m);

nlohmann::json solve_report(const ClassicalPath& path);
nlohmann::json series_report(const SeriesResult& r);
nlohmann::json diagrams_report(int max_loops);
nlohmann::json eval_report(const std::string& key, std::int64_t aut, const DiagramValue& v);
nlohmann::json kernel_report(const GreenKernel& kernel, double s, double u);
nlohmann::json residual_report(const ResidualReport& r);
nlohmann::json hamilton_jacobi_report(const HamiltonJacobiReport& r);
nlohmann::json short_time_report(const ShortTimeReport& r);
nlohmann::json semigroup_report(const SemigroupReport& r);

/// Adds the top-level "schema" field.
nlohmann::json with_schema(nlohmann::json body);

/// Renders an array of flat objects as CSV with a header row taken from the
/// first object's keys.
std::string to_csv(const nlohmann::json& rows);

}  // namespace semiprop
