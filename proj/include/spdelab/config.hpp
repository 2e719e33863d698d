#pragma once

// JSON run configuration: sections grid{d,n,L}, time{T,M},
// coefficients{family,params,K}, data{u0,f,g}, norms{gamma,p},
// mc{paths,seed}.  Unknown keys are rejected by name; defaults are
// p = 2, gamma = 0, K = 8, n = 64.

#include <cstdint>
#include <string>
#include <vector>

#include "spdelab/coefficients.hpp"
#include "spdelab/pde_solver.hpp"

namespace spdelab {

// A data slot is either a named generator with parameters or a field-file
// path.  Generators: "zero", "sin" (params mode[], amplitude), "gaussian"
// (params center[], width, amplitude), "random_bandlimited" (params kmax,
// amplitude, seed).
struct DataSpec {
    std::string generator = "zero";
    std::string file;            // non-empty: read this field file instead
    std::vector<int> mode;       // sin
    std::vector<double> center;  // gaussian
    double width = 1.0;
    double amplitude = 1.0;
    int kmax = 2;                // random_bandlimited
    std::uint64_t seed = 0;
};

struct RunConfig {
    Grid grid;
    double T = 1.0;
    int M = 64;
    CoefficientFamily family;
    int K = 8;
    DataSpec u0, f, g;
    double gamma = 0.0;
    double p = 2.0;
    int paths = 100;
    std::uint64_t seed = 1;
    std::string raw_json;  // canonical echo for provenance

    std::vector<double> time_grid() const;
};

/// Parses and validates; throws std::invalid_argument naming the first
/// offending or unknown key.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// FNV-1a hash of the canonical config echo, for provenance stamps.
std::uint64_t config_hash(const RunConfig& config);

/// Realizes a data slot as a spectrum with the given arity (1 for u0/f,
/// K for g).  Deterministic given the spec.
Spectrum make_data(const DataSpec& spec, const Grid& grid, int arity);

}  // namespace spdelab
