#pragma once

// Wiener increments for the K drivers, the auxiliary diffusion X' used by
// the representation formulas, and the shift process x_t = int sigma dw.

#include <cstdint>
#include <vector>

#include "spdelab/coefficients.hpp"

namespace spdelab {

struct WienerPath {
    std::vector<double> times;  // nodes, shared with the coefficient path
    int K = 1;
    std::vector<double> dw;  // K x M, k-major: dw[k*M + m]
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;

    std::size_t intervals() const { return times.size() - 1; }
    double increment(int k, std::size_t m) const { return dw[static_cast<std::size_t>(k) * intervals() + m]; }

    /// w^k at node m (partial sums of increments).
    double value(int k, std::size_t m) const;
};

/// Gaussian increments N(0, dt) on the given grid, stream keyed by
/// (seed, path_index, "w").  `substeps` subdivides each interval uniformly;
/// increments are always drawn at `master_substeps` resolution and summed,
/// so coarse paths are consistent restrictions of fine ones
/// (requires substeps | master_substeps).
WienerPath sample_wiener(int K, const std::vector<double>& time_grid, std::uint64_t seed,
                         std::uint64_t path_index, int substeps = 1, int master_substeps = 0);

struct AuxiliaryPath {
    std::vector<double> times;
    int d = 1;
    std::vector<double> dx;  // d x M increments of X', i-major
    std::size_t intervals() const { return times.size() - 1; }
    double increment(int i, std::size_t m) const { return dx[static_cast<std::size_t>(i) * intervals() + m]; }
    /// X' at node m.
    std::vector<double> node(std::size_t m) const;
};

/// sigma' with sigma' sigma' = 2A (the representation-formula convention
/// puts the factor 2 here).  A must be PSD up to clamping tolerance.
inline SymMat symmetric_sqrt(const SymMat& A) { return sqrt_psd(A.scaled(2.0)); }

/// Which matrix drives the auxiliary diffusion: sigma' = sqrt(2 a) for the
/// deterministic representation, sqrt(2 alpha) after the shift reduction.
enum class AuxDrift { FullA, Alpha };

/// Per interval dX' = sigma'_m dW'_m with sigma'_m = sqrt(2 A_m); exact in
/// distribution for piecewise-constant coefficients.  W' uses its own
/// stream family ("aux"), independent of every WienerPath.
AuxiliaryPath auxiliary_increments(const CoefficientPath& path, std::uint64_t aux_seed,
                                  std::uint64_t path_index, AuxDrift drift = AuxDrift::FullA,
                                  int substeps = 1);

/// x_{t_{m+1}} = x_{t_m} + sigma_m dw_m; returns d x (M+1) node values,
/// i-major.  Exact for piecewise-constant sigma.
std::vector<double> shift_process(const CoefficientPath& coeffs, const WienerPath& w);

}  // namespace spdelab
