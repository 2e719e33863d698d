#pragma once

// Plain-text field files: one JSON header line {d, n, L, arity, dtype}
// followed by whitespace-separated values in row-major order, components
// block-wise.  Values are printed with 17 significant digits so finite
// data round-trips bit-identically.

#include <string>

#include "spdelab/coefficients.hpp"
#include "spdelab/pde_solver.hpp"

namespace spdelab {

/// dtype "f64" drops imaginary parts (they must be zero); "c128" writes
/// re im pairs.
void write_field(const std::string& path, const GridField& field, bool complex_values = true);
void write_spectrum(const std::string& path, const Spectrum& spec);

GridField read_field(const std::string& path);
Spectrum read_spectrum(const std::string& path);

/// Coefficient path as a JSON document (times, a, sigma, family, seed).
void write_coefficients(const std::string& path, const CoefficientPath& coeffs);
CoefficientPath read_coefficients(const std::string& path);

/// One field file per time node plus a JSON manifest holding the time
/// grid, the seeds, and the coefficient file reference.
void write_trajectory(const std::string& dir, const std::string& stem, const Trajectory& traj,
                      const CoefficientPath& coeffs);

}  // namespace spdelab
