#pragma once

#include <string>

#include "json.hpp"
#include "csfem/study.hpp"

namespace csfem {

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

// Surfaces constructible from a JSON case description: kind plus parameters
// ("flat_square", "flat_two_patch", "flat_junction", "sharp_edge_L",
// "intersecting_cylinders").
CompositeSurface surface_from_json(const nlohmann::json& j);

void write_matrix_market(const SpMat& A, const std::string& path);
void write_matrix_market(const VectorX& b, const std::string& path);

}  // namespace csfem
