#pragma once

#include "nahmforge/nahm.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace nahmforge {

/// JSON schema (field names fixed for cross-tool use):
///   { "dim": int, "domain": [a, b], "kind": "closed-form" | "numeric",
///     "family"?: string, "params"?: object,
///     "grid"?: [t...], "samples"?: [[re, im, ...] ...] }
/// Numeric samples flatten T1, T2, T3 row-major with interleaved real/imag parts.
nlohmann::ordered_json solution_to_json(const NahmSolution& s);
NahmSolution solution_from_json(const nlohmann::json& j);

void save_solution(const NahmSolution& s, const std::string& path);
NahmSolution load_solution(const std::string& path);

/// Sample any solution onto a fresh numeric representation.
NahmSolution resampled_numeric(const NahmSolution& s, const std::vector<double>& grid);

}  // namespace nahmforge
