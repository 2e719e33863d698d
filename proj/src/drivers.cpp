#include "spdelab/drivers.hpp"

#include <cmath>
#include <stdexcept>

#include "spdelab/rng.hpp"

namespace spdelab {

double WienerPath::value(int k, std::size_t m) const {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += increment(k, j);
    return s;
}

WienerPath sample_wiener(int K, const std::vector<double>& time_grid, std::uint64_t seed,
                         std::uint64_t path_index, int substeps, int master_substeps) {
    if (K < 1) throw std::invalid_argument("sample_wiener: K must be >= 1");
    if (time_grid.size() < 2) throw std::invalid_argument("sample_wiener: empty time grid");
    if (substeps < 1) throw std::invalid_argument("sample_wiener: substeps must be >= 1");
    if (master_substeps == 0) master_substeps = substeps;
    if (master_substeps % substeps != 0)
        throw std::invalid_argument("sample_wiener: substeps must divide master_substeps");

    const std::size_t M0 = time_grid.size() - 1;
    const int group = master_substeps / substeps;

    WienerPath path;
    path.K = K;
    path.seed = seed;
    path.path_index = path_index;
    path.times.reserve(M0 * substeps + 1);
    path.times.push_back(time_grid.front());
    for (std::size_t m = 0; m < M0; ++m) {
        const double t0 = time_grid[m], t1 = time_grid[m + 1];
        for (int s = 1; s <= substeps; ++s)
            path.times.push_back(t0 + (t1 - t0) * s / substeps);
    }
    const std::size_t M = M0 * static_cast<std::size_t>(substeps);
    path.dw.assign(static_cast<std::size_t>(K) * M, 0.0);

    Rng rng(seed, path_index, "w");
    // Fixed draw order (m, sub, k) at master resolution; aggregation to the
    // requested resolution sums whole groups, so coarse increments match
    // fine ones exactly.
    for (std::size_t m0 = 0; m0 < M0; ++m0) {
        const double dt_master = (time_grid[m0 + 1] - time_grid[m0]) / master_substeps;
        const double sd = dt_master > 0.0 ? std::sqrt(dt_master) : 0.0;
        for (int sub = 0; sub < master_substeps; ++sub) {
            const std::size_t m = m0 * substeps + static_cast<std::size_t>(sub / group);
            for (int k = 0; k < K; ++k)
                path.dw[static_cast<std::size_t>(k) * M + m] += sd * rng.normal();
        }
    }
    return path;
}

std::vector<double> AuxiliaryPath::node(std::size_t m) const {
    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i)
        for (std::size_t j = 0; j < m; ++j) x[i] += increment(i, j);
    return x;
}

AuxiliaryPath auxiliary_increments(const CoefficientPath& path, std::uint64_t aux_seed,
                                   std::uint64_t path_index, AuxDrift drift, int substeps) {
    if (substeps < 1) throw std::invalid_argument("auxiliary_increments: substeps must be >= 1");
    const int d = path.d;
    const std::size_t M0 = path.intervals();

    AuxiliaryPath aux;
    aux.d = d;
    aux.times.reserve(M0 * substeps + 1);
    aux.times.push_back(path.times.front());
    for (std::size_t m = 0; m < M0; ++m) {
        const double t0 = path.times[m], t1 = path.times[m + 1];
        for (int s = 1; s <= substeps; ++s)
            aux.times.push_back(t0 + (t1 - t0) * s / substeps);
    }
    const std::size_t M = M0 * static_cast<std::size_t>(substeps);
    aux.dx.assign(static_cast<std::size_t>(d) * M, 0.0);

    Rng rng(aux_seed, path_index, "aux");
    for (std::size_t m0 = 0; m0 < M0; ++m0) {
        SymMat A = (drift == AuxDrift::FullA) ? path.a[m0].symmetrized()
                                              : clamp_psd(alpha_matrix(path, m0));
        const SymMat sig = sqrt_psd(A.scaled(2.0));
        const double dt_sub = path.dt(m0) / substeps;
        const double sd = std::sqrt(dt_sub);
        for (int sub = 0; sub < substeps; ++sub) {
            const std::size_t m = m0 * substeps + static_cast<std::size_t>(sub);
            double z[3];
            for (int i = 0; i < d; ++i) z[i] = sd * rng.normal();
            for (int i = 0; i < d; ++i) {
                double v = 0.0;
                for (int j = 0; j < d; ++j) v += sig(i, j) * z[j];
                aux.dx[static_cast<std::size_t>(i) * M + m] = v;
            }
        }
    }
    return aux;
}

std::vector<double> shift_process(const CoefficientPath& coeffs, const WienerPath& w) {
    if (coeffs.times != w.times)
        throw std::invalid_argument("shift_process: coefficient and Wiener time grids differ");
    const int d = coeffs.d;
    const int K = coeffs.K;
    if (w.K != K) throw std::invalid_argument("shift_process: driver count mismatch");
    const std::size_t M = coeffs.intervals();
    std::vector<double> x(static_cast<std::size_t>(d) * (M + 1), 0.0);
    for (std::size_t m = 0; m < M; ++m) {
        for (int i = 0; i < d; ++i) {
            double step = 0.0;
            for (int k = 0; k < K; ++k)
                step += coeffs.sigma[m][static_cast<std::size_t>(i) * K + k] * w.increment(k, m);
            x[static_cast<std::size_t>(i) * (M + 1) + m + 1] =
                x[static_cast<std::size_t>(i) * (M + 1) + m] + step;
        }
    }
    return x;
}

}  // namespace spdelab
