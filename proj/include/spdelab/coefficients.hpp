#pragma once

// Realizations of the random coefficients a(t), sigma(t), the reduced
// matrix alpha = a - (1/2) sigma sigma^T, the degeneracy weight delta(t)
// (smallest eigenvalue of alpha), and the admissibility checks.

#include <cstdint>
#include <string>
#include <vector>

#include "spdelab/linalg.hpp"

namespace spdelab {

enum class FamilyKind {
    ConstantElliptic,     // a = (kappa/2) I, sigma = 0
    DegenerateWindow,     // elliptic on [0, frac*T], zero after
    VanishingEigenvalue,  // alpha rank-deficient on a sublattice of intervals
    UnboundedIntegrable,  // a(t) ~ c t^{-theta}, theta < 1
    FullyDegenerate,      // a = 0, sigma = 0
    RandomPsd,            // Wishart-style alpha draws plus random sigma
};

std::string family_name(FamilyKind k);
FamilyKind family_from_name(const std::string& s);

struct CoefficientFamily {
    FamilyKind kind = FamilyKind::ConstantElliptic;
    double kappa = 1.0;          // ellipticity level for the elliptic kinds
    double window_fraction = 0.5;// DegenerateWindow: elliptic part of [0,T]
    double theta = 0.5;          // UnboundedIntegrable exponent, must be < 1
    double scale = 1.0;          // UnboundedIntegrable prefactor / RandomPsd size
    double sigma_scale = 0.0;    // row scale of random sigma (RandomPsd)
    int degenerate_rank = 1;     // VanishingEigenvalue: # vanishing directions
    int degenerate_stride = 2;   // VanishingEigenvalue: every k-th interval
};

// One realization of piecewise-constant-in-time coefficients.
struct CoefficientPath {
    std::vector<double> times;   // 0 = t_0 < ... < t_M = T
    std::vector<SymMat> a;       // per interval, d x d symmetric
    std::vector<std::vector<double>> sigma;  // per interval, d*K row-major
    int d = 1;
    int K = 1;
    std::string family;
    std::uint64_t seed = 0;

    std::size_t intervals() const { return a.size(); }
    double dt(std::size_t m) const { return times[m + 1] - times[m]; }
};

enum class WeightKind {
    One,                 // unweighted
    Delta,               // delta
    DeltaOneMinusP,      // delta^{1-p}
    DeltaOneMinusHalfP,  // delta^{1-p/2}  (== 1 when p == 2, even at delta = 0)
    SigmaPDeltaOneMinusP,// |sigma|^p delta^{1-p}
    SigmaP,              // |sigma|^p
};

struct AssumptionReport {
    double min_alpha_eigenvalue = 0.0;
    double a_integral = 0.0;        // sum_m |a_m| dt_m
    double sigma_sq_integral = 0.0; // sum_m |sigma_m|^2 dt_m
    bool psd_ok = false;
    bool integrable_ok = false;
    bool pass() const { return psd_ok && integrable_ok; }
};

/// Samples one coefficient path; deterministic given (family, seed).
/// The sampled path always satisfies the admissibility checks.
CoefficientPath sample_path(const CoefficientFamily& family, int d, int K,
                            const std::vector<double>& time_grid, std::uint64_t seed);

/// alpha_m = a_m - (1/2) sigma_m sigma_m^T, symmetrized.
SymMat alpha_matrix(const CoefficientPath& path, std::size_t m);

/// |sigma(t)| = max over rows i of |sigma^i|_{l2}.
double sigma_sup(const CoefficientPath& path, std::size_t m);

/// delta_m = smallest eigenvalue of alpha_m, floored at 0.
double delta_weight(const CoefficientPath& path, std::size_t m);

/// Weight value on interval m.  delta = 0 conventions: delta^{1-p} = +inf
/// (0*inf := 0 downstream) and delta^{1-p/2} = 1 when p = 2.
double weight(const CoefficientPath& path, WeightKind kind, double p, std::size_t m);

/// Same conventions applied to a raw (delta, |sigma|) pair.
double weight_value(double delta, double sigma_sup_val, WeightKind kind, double p);

AssumptionReport check_assumptions(const CoefficientPath& path);

/// Weighted accumulation obeying 0*inf := 0.
double weighted_term(double term, double w);

}  // namespace spdelab
