#pragma once

// Dyadic partition of unity on frequency space, the block operators
// Delta_j and S_0, and Besov norms built from them.

#include "spdelab/grid.hpp"

namespace spdelab {

// Radial profile psi_hat(r) = chi(r) / sum_j chi(2^{-j} r), where chi is a
// fixed positive bump supported in the open annulus (1/2, 2).  The
// normalized profiles sum to 1 for every r > 0 by construction; the grid
// can only represent shells j in [j_min, j_max].
struct DyadicPartition {
    Grid grid;
    int j_min = 0;
    int j_max = 0;

    // psi_hat(2^{-j} |xi|) for a single shell.
    double shell_multiplier(int j, double xi_abs) const;

    // sum_{j <= 0} psi_hat(2^{-j} |xi|); equals 1 at xi = 0 by convention.
    double low_multiplier(double xi_abs) const;

    // sum over all shells (finite: at most two are active per frequency).
    double total(double xi_abs) const;

    // True when every shell active at |xi| lies inside [j_min, j_max].
    bool covered(double xi_abs) const;
};

/// Builds the partition for a grid.  Rejects grids too coarse to host at
/// least three dyadic shells.
DyadicPartition build_partition(const Grid& grid);

/// Delta_j u: spectral multiplier psi_hat(2^{-j} xi).
GridField block(const GridField& field, int j, const DyadicPartition& part);
Spectrum block(const Spectrum& spec, int j, const DyadicPartition& part);

/// S_0 u: multiplier sum_{j<=0} psi_hat(2^{-j} xi), DC passed through.
GridField low_block(const GridField& field, const DyadicPartition& part);
Spectrum low_block(const Spectrum& spec, const DyadicPartition& part);

/// ||S_0 u||_{L_p} + (sum_{j>=1} 2^{gamma p j} ||Delta_j u||_{L_p}^p)^{1/p}.
double besov_norm(const GridField& field, double gamma, double p, const DyadicPartition& part);

/// (sum_{j} 2^{gamma p j} ||Delta_j u||_{L_p}^p)^{1/p} over representable j.
double homogeneous_besov_norm(const GridField& field, double gamma, double p,
                              const DyadicPartition& part);

double besov_norm(const Spectrum& spec, double gamma, double p, const DyadicPartition& part);
double homogeneous_besov_norm(const Spectrum& spec, double gamma, double p,
                              const DyadicPartition& part);

}  // namespace spdelab
