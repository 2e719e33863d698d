#pragma once

// Deterministic equation du/dt = a^{ij}(t) u_{x^i x^j} + f, solved exactly
// per Fourier mode: multiplier exp(-int a(r) xi xi dr) with exact Duhamel
// forcing for piecewise-constant data.  The Feynman-Kac Monte Carlo
// estimate is kept as an independent validation oracle.

#include <cstdint>
#include <functional>
#include <vector>

#include "spdelab/coefficients.hpp"
#include "spdelab/grid.hpp"

namespace spdelab {

// Piecewise-constant-in-time forcing: empty = zero, one entry = constant
// in time, M entries = one per interval.
struct Forcing {
    std::vector<Spectrum> pieces;

    bool zero() const { return pieces.empty(); }
    const Spectrum& at(std::size_t m) const {
        return pieces.size() == 1 ? pieces.front() : pieces.at(m);
    }
    void validate(std::size_t intervals, const Grid& grid, int arity) const;
};

// Time-indexed spectra for one realization.
struct Trajectory {
    std::vector<double> times;
    std::vector<Spectrum> states;  // one per node, times.size() entries
    std::uint64_t coeff_seed = 0;
    std::uint64_t wiener_seed = 0;
    std::uint64_t path_index = 0;

    const Spectrum& at(std::size_t m) const { return states.at(m); }
    const Spectrum& back() const { return states.back(); }
};

/// int_s^t a(r) xi xi dr per mode, exact for piecewise constants; applies
/// exp(-integral) to every coefficient.  Requires 0 <= s <= t <= T.
Spectrum evolve_multiplier(const Spectrum& spec, const CoefficientPath& coeffs, double s, double t);

/// Exact Duhamel evolution on the coefficient time grid:
/// u_hat(t_{m+1}) = e^{-q dt} u_hat(t_m) + (1 - e^{-q dt})/q * f_hat_m,
/// with the q -> 0 limit dt substituted analytically.
Trajectory solve_deterministic(const Spectrum& u0, const Forcing& f, const CoefficientPath& coeffs);

struct FeynmanKacResult {
    GridField mean;       // estimate of u(T, .)
    GridField std_error;  // per-point standard error of the mean
};

/// Monte-Carlo average of u0(x + X'_T) + int f(s, x + X'_T - X'_s) ds over
/// auxiliary paths with sigma' = sqrt(2a).  Shifted-point evaluation is a
/// Fourier phase (trigonometric interpolation, exact on band-limited
/// fields); the time integral uses midpoint nodes on each interval.
FeynmanKacResult feynman_kac_oracle(const GridField& u0, const Forcing& f,
                                    const CoefficientPath& coeffs, int n_paths,
                                    std::uint64_t aux_seed);

/// Convolution with the scaled bump phi_eps = eps^{-d} phi(x/eps),
/// executed spectrally; the discrete kernel is normalized to unit mass so
/// constants pass through exactly.  Requires eps <= L/4.
GridField mollify(const GridField& field, double eps);

}  // namespace spdelab
