#pragma once

#include <string>

#include "riemfpp/scalar_field.hpp"

namespace riemfpp {

/// Writes <base>.bin (flat doubles, x fastest) and <base>.json
/// (dimension, origin, extent, spacing, seed, covariance).
void save_field(const ScalarField& field, const std::string& base_path);

ScalarField load_field(const std::string& base_path);

/// Node values as CSV: x,y[,z],value
void export_field_csv(const ScalarField& field, const std::string& path);

}  // namespace riemfpp
