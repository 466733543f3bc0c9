#pragma once

#include <filesystem>
#include <ostream>

#include "ccpwf/migration/transition_matrix.hpp"
#include "json.hpp"

namespace ccpwf::migration {

// K rows of K comma-separated probabilities. Shape and stochasticity errors
// surface as ConfigError.
RatingTransitionMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const RatingTransitionMatrix& m);

// Either a K x K array of arrays, or {"family": {...}} describing a
// RatingFamily (missing fields take the family defaults).
RatingTransitionMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RatingTransitionMatrix& m);

}  // namespace ccpwf::migration
