#pragma once

// Additive-noise SPDE du = (a u_xx + f) dt + g^k dw^k, solved exactly per
// mode, plus the shift reduction of the full multiplicative equation, the
// time-change route, the eps-regularization sweep, and an Euler-Maruyama
// oracle for refinement-rate checks.

#include "spdelab/drivers.hpp"
#include "spdelab/pde_solver.hpp"

namespace spdelab {

/// Per mode xi and interval with q = a_m xi xi:
///   u_hat(t_{m+1}) = e^{-q dt} u_hat(t_m) + (1-e^{-q dt})/q f_hat_m
///                    + e^{-q dt} sum_k g_hat^k_m dw^k_m,
/// with the q -> 0 limits substituted analytically.  Exact in distribution
/// for piecewise-constant data; the stochastic increment is damped with
/// the left-endpoint (Ito) multiplier.
Trajectory solve_additive(const Spectrum& u0, const Forcing& f, const Forcing& g,
                          const std::vector<SymMat>& drift, const std::vector<double>& times,
                          const WienerPath& w);

/// Drift taken from the path's a matrices (sigma ignored).
Trajectory solve_additive(const Spectrum& u0, const Forcing& f, const Forcing& g,
                          const CoefficientPath& coeffs, const WienerPath& w);

/// Full multiplicative equation via the shift v(t,x) = u(t,x - x_t) with
/// x_t = int sigma dw: solves the additive equation with drift alpha and
/// shifted data, then undoes the shift.  Phase factors e^{-i xi.x_t} use
/// the left-endpoint value on each interval.
Trajectory solve_full(const Spectrum& u0, const Forcing& f, const Forcing& g,
                      const CoefficientPath& coeffs, const WienerPath& w);

/// Direct per-mode Euler-Maruyama discretization of the multiplicative
/// equation.  Owns its refined Wiener path: increments are drawn at
/// `master_substeps` resolution (default: substeps), so runs at different
/// substep counts share one underlying Brownian path.
Trajectory euler_maruyama_oracle(const Spectrum& u0, const Forcing& f, const Forcing& g,
                                 const CoefficientPath& coeffs, std::uint64_t wiener_seed,
                                 std::uint64_t path_index, int substeps, int master_substeps = 0);

/// Time-change route of the additive equation: beta(t) = int_0^t delta,
/// unit-ellipticity coefficients a/delta on the beta-clock, data f/delta
/// and g/sqrt(delta), increments dw~ = sqrt(delta) dw.  delta_m is the
/// smallest eigenvalue of a_m and must be strictly positive.  The result
/// is reported on the original clock and equals solve_additive exactly.
Trajectory time_change_solve(const Spectrum& u0, const Forcing& f, const Forcing& g,
                             const CoefficientPath& coeffs, const WienerPath& w);

struct RegularizationReport {
    std::vector<double> eps;
    std::vector<double> sup_lp_diff;      // sup_t ||u_eps(t) - u(t)||_{L_p}
    std::vector<double> weighted_uxx_p;   // ||(u_eps)_xx||^p_{L_p(T, delta_eps)}
    std::vector<double> remainder;        // sum_m eps^p delta_eps^{1-p} ||Lap u||^p dt
    std::vector<double> remainder_bound;  // eps * sum_m ||Lap u||^p dt
    bool monotone = false;                // sup_lp_diff decreasing along eps
};

/// Solves with a + eps I (delta_eps = delta + eps) for each eps in the
/// decreasing list and reports convergence plus the vanishing weighted
/// remainder term eps^p delta_eps^{1-p} ||Lap u||^p.
RegularizationReport regularization_sweep(const Spectrum& u0, const Forcing& f, const Forcing& g,
                                          const CoefficientPath& coeffs, const WienerPath& w,
                                          const std::vector<double>& eps_list, double p = 2.0);

/// Representation formula for the additive equation with nonrandom
/// coefficients: inner Monte Carlo over the auxiliary diffusion X'
/// (sigma' = sqrt(2a)), outer stochastic integration against the given
/// Wiener increments.
FeynmanKacResult representation_oracle_spde(const GridField& u0, const Forcing& f,
                                            const Forcing& g, const CoefficientPath& coeffs,
                                            const WienerPath& w, int n_aux_paths,
                                            std::uint64_t aux_seed);

}  // namespace spdelab
