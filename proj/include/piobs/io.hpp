#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "piobs/analysis.hpp"
#include "piobs/synthesis.hpp"

namespace piobs::io {

using Json = nlohmann::json;

/// Row-major nested arrays. An empty array is a 0x0 matrix; [[]] is 1x0.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& name);

/// [[re, im], ...]
Json spectrum_to_json(const Spectrum& s);
Spectrum spectrum_from_json(const Json& j, const std::string& name);

/// {"A": ..., "B": ..., "C": ...}
Json system_to_json(const StateSpaceSystem& sys);
StateSpaceSystem system_from_json(const Json& j, double rank_tol = -1.0);

Json design_to_json(const ObserverDesign& d);
ObserverDesign design_from_json(const Json& j);

Json detectability_to_json(const DetectabilityReport& r);

/// Comma-separated list of real or complex numbers, e.g. "-1,-2+3i,-2-3i".
PoleList parse_pole_list(const std::string& text);

/// Comma-separated reals.
Vector parse_vector(const std::string& text);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace piobs::io
