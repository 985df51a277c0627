#pragma once

#include <string>

#include "sskinetic/grid.hpp"

namespace sskinetic {

/**
 * Field snapshot files carry a one-line JSON header {"L":..,"N0":..,"time":..}
 * followed by the n0^3 node values in flat order. A ".csv" path stores one
 * value per line in full round-trip precision; a ".f64" path stores raw
 * little-endian IEEE-754 doubles.
 */
struct FieldSnapshot {
  VelocityGrid grid;
  Real time = 0;
  ScalarField values;
};

void write_field(const std::string& path, const VelocityGrid& grid,
                 const ScalarField& values, Real time);

/// Throws std::runtime_error on malformed header, size mismatch, or IO failure.
FieldSnapshot read_field(const std::string& path);

}  // namespace sskinetic
