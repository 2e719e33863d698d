#include "spdelab/spde_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace spdelab {

namespace {

double duhamel_factor(double q, double dt) {
    if (std::abs(q * dt) < 1e-12) return dt;
    return -std::expm1(-q * dt) / q;
}

std::vector<double> mode_quadratic(const Grid& g, const SymMat& a) {
    std::vector<double> q(g.size());
    int idx[3];
    double xi[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        for (int ax = 0; ax < g.d; ++ax) xi[ax] = g.freq(idx[ax]);
        q[i] = a.quad(xi);
    }
    return q;
}

// e^{-i xi.x} phases for a shift vector x.
std::vector<cplx> shift_phases(const Grid& g, const double* x, double sign) {
    std::vector<cplx> ph(g.size());
    int idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        double arg = 0.0;
        for (int ax = 0; ax < g.d; ++ax) arg += g.freq(idx[ax]) * x[ax];
        ph[i] = std::polar(1.0, sign * arg);
    }
    return ph;
}

}  // namespace

Trajectory solve_additive(const Spectrum& u0, const Forcing& f, const Forcing& g,
                          const std::vector<SymMat>& drift, const std::vector<double>& times,
                          const WienerPath& w) {
    if (times != w.times)
        throw std::invalid_argument("solve_additive: Wiener and coefficient grids differ");
    const std::size_t M = times.size() - 1;
    if (drift.size() != M) throw std::invalid_argument("solve_additive: drift list size mismatch");
    if (!u0.finite()) throw std::invalid_argument("solve_additive: non-finite initial data");
    f.validate(M, u0.grid, 1);
    g.validate(M, u0.grid, w.K);

    Trajectory traj;
    traj.times = times;
    traj.wiener_seed = w.seed;
    traj.path_index = w.path_index;
    traj.states.reserve(M + 1);
    traj.states.push_back(u0);

    const std::size_t N = u0.grid.size();
    Spectrum cur = u0;
    for (std::size_t m = 0; m < M; ++m) {
        const double dt = times[m + 1] - times[m];
        const std::vector<double> q = mode_quadratic(u0.grid, drift[m]);
        const Spectrum* fm = f.zero() ? nullptr : &f.at(m);
        const Spectrum* gm = g.zero() ? nullptr : &g.at(m);
        Spectrum next = cur;
        for (std::size_t i = 0; i < N; ++i) {
            const double decay = std::exp(-q[i] * dt);
            cplx v = decay * cur.coeffs[i];
            if (fm) v += duhamel_factor(q[i], dt) * fm->coeffs[i];
            if (gm) {
                cplx noise{};
                for (int k = 0; k < w.K; ++k) noise += gm->at(i, k) * w.increment(k, m);
                v += decay * noise;
            }
            next.coeffs[i] = v;
        }
        cur = std::move(next);
        traj.states.push_back(cur);
    }
    return traj;
}

Trajectory solve_additive(const Spectrum& u0, const Forcing& f, const Forcing& g,
                          const CoefficientPath& coeffs, const WienerPath& w) {
    std::vector<SymMat> drift;
    drift.reserve(coeffs.intervals());
    for (const SymMat& a : coeffs.a) drift.push_back(a.symmetrized());
    Trajectory traj = solve_additive(u0, f, g, drift, coeffs.times, w);
    traj.coeff_seed = coeffs.seed;
    return traj;
}

Trajectory solve_full(const Spectrum& u0, const Forcing& f, const Forcing& g,
                      const CoefficientPath& coeffs, const WienerPath& w) {
    const Grid& grid = u0.grid;
    const std::size_t M = coeffs.intervals();
    f.validate(M, grid, 1);
    g.validate(M, grid, w.K);

    const std::vector<double> x = shift_process(coeffs, w);
    const std::size_t N = grid.size();
    const int d = coeffs.d;

    std::vector<SymMat> drift;
    drift.reserve(M);
    for (std::size_t m = 0; m < M; ++m) drift.push_back(clamp_psd(alpha_matrix(coeffs, m)));

    // shifted data per interval (left-endpoint phase)
    Forcing F, G;
    if (!f.zero() || !g.zero()) {
        F.pieces.reserve(f.zero() && g.zero() ? 0 : M);
    }
    if (!g.zero()) G.pieces.reserve(M);

    int idx[3];
    for (std::size_t m = 0; m < M; ++m) {
        double xm[3] = {0, 0, 0};
        for (int i = 0; i < d; ++i) xm[i] = x[static_cast<std::size_t>(i) * (M + 1) + m];
        const bool need_F = !f.zero() || !g.zero();
        if (need_F) {
            Spectrum Fm(grid, 1);
            for (std::size_t i = 0; i < N; ++i) {
                grid.unflatten(i, idx);
                double arg = 0.0;
                for (int ax = 0; ax < d; ++ax) arg += grid.freq(idx[ax]) * xm[ax];
                const cplx phase = std::polar(1.0, -arg);
                cplx v{};
                if (!f.zero()) v += f.at(m).coeffs[i];
                if (!g.zero()) {
                    // - sigma^{ik} g^k_{x^i}: multiplier -i xi_i sigma^{ik}
                    const Spectrum& gm = g.at(m);
                    for (int k = 0; k < w.K; ++k) {
                        cplx grad{};
                        for (int ax = 0; ax < d; ++ax) {
                            const double s =
                                coeffs.sigma[m][static_cast<std::size_t>(ax) * coeffs.K + k];
                            if (s != 0.0)
                                grad += cplx{0.0, grid.freq(idx[ax])} * s * gm.at(i, k);
                        }
                        v -= grad;
                    }
                }
                Fm.coeffs[i] = phase * v;
            }
            F.pieces.push_back(std::move(Fm));
        }
        if (!g.zero()) {
            Spectrum Gm(grid, w.K);
            const std::vector<cplx> ph = shift_phases(grid, xm, -1.0);
            for (std::size_t i = 0; i < N; ++i)
                for (int k = 0; k < w.K; ++k) Gm.at(i, k) = ph[i] * g.at(m).at(i, k);
            G.pieces.push_back(std::move(Gm));
        }
    }

    Trajectory v = solve_additive(u0, F, G, drift, coeffs.times, w);
    v.coeff_seed = coeffs.seed;

    // undo the shift: u(t, x) = v(t, x + x_t)
    for (std::size_t m = 0; m <= M; ++m) {
        double xm[3] = {0, 0, 0};
        for (int i = 0; i < d; ++i) xm[i] = x[static_cast<std::size_t>(i) * (M + 1) + m];
        if (xm[0] == 0.0 && xm[1] == 0.0 && xm[2] == 0.0) continue;
        const std::vector<cplx> ph = shift_phases(grid, xm, +1.0);
        for (std::size_t i = 0; i < N; ++i) v.states[m].coeffs[i] *= ph[i];
    }
    return v;
}

Trajectory euler_maruyama_oracle(const Spectrum& u0, const Forcing& f, const Forcing& g,
                                 const CoefficientPath& coeffs, std::uint64_t wiener_seed,
                                 std::uint64_t path_index, int substeps, int master_substeps) {
    if (substeps < 1) throw std::invalid_argument("euler_maruyama_oracle: substeps must be >= 1");
    const Grid& grid = u0.grid;
    const std::size_t M = coeffs.intervals();
    f.validate(M, grid, 1);
    g.validate(M, grid, coeffs.K);

    const WienerPath w =
        sample_wiener(coeffs.K, coeffs.times, wiener_seed, path_index, substeps, master_substeps);

    Trajectory traj;
    traj.times = w.times;
    traj.wiener_seed = wiener_seed;
    traj.path_index = path_index;
    traj.coeff_seed = coeffs.seed;
    traj.states.reserve(w.times.size());
    traj.states.push_back(u0);

    const std::size_t N = grid.size();
    int idx[3];
    Spectrum cur = u0;
    for (std::size_t m = 0; m < M; ++m) {
        const std::vector<double> q = mode_quadratic(grid, coeffs.a[m].symmetrized());
        const Spectrum* fm = f.zero() ? nullptr : &f.at(m);
        const Spectrum* gm = g.zero() ? nullptr : &g.at(m);
        for (int sub = 0; sub < substeps; ++sub) {
            const std::size_t n = m * static_cast<std::size_t>(substeps) + sub;
            const double dt = w.times[n + 1] - w.times[n];
            Spectrum next = cur;
            for (std::size_t i = 0; i < N; ++i) {
                grid.unflatten(i, idx);
                cplx v = cur.coeffs[i];
                v += (-q[i] * cur.coeffs[i] + (fm ? fm->coeffs[i] : cplx{})) * dt;
                for (int k = 0; k < coeffs.K; ++k) {
                    cplx mult{};
                    for (int ax = 0; ax < coeffs.d; ++ax) {
                        const double s = coeffs.sigma[m][static_cast<std::size_t>(ax) * coeffs.K + k];
                        if (s != 0.0) mult += cplx{0.0, grid.freq(idx[ax])} * s;
                    }
                    cplx term = mult * cur.coeffs[i];
                    if (gm) term += gm->at(i, k);
                    v += term * w.increment(k, n);
                }
                next.coeffs[i] = v;
            }
            cur = std::move(next);
            traj.states.push_back(cur);
        }
    }
    return traj;
}

Trajectory time_change_solve(const Spectrum& u0, const Forcing& f, const Forcing& g,
                             const CoefficientPath& coeffs, const WienerPath& w) {
    const std::size_t M = coeffs.intervals();
    f.validate(M, u0.grid, 1);
    g.validate(M, u0.grid, w.K);

    std::vector<double> delta(M);
    for (std::size_t m = 0; m < M; ++m) {
        delta[m] = smallest_eigenvalue(coeffs.a[m].symmetrized());
        if (!(delta[m] > 0.0))
            throw std::invalid_argument("time_change_solve: requires strictly positive delta");
    }

    // beta-clock grid and unit-ellipticity data
    std::vector<double> beta_times(M + 1);
    beta_times[0] = 0.0;
    for (std::size_t m = 0; m < M; ++m)
        beta_times[m + 1] = beta_times[m] + delta[m] * coeffs.dt(m);

    std::vector<SymMat> drift(M, SymMat(coeffs.d));
    for (std::size_t m = 0; m < M; ++m)
        drift[m] = coeffs.a[m].symmetrized().scaled(1.0 / delta[m]);

    WienerPath wt;
    wt.times = beta_times;
    wt.K = w.K;
    wt.seed = w.seed;
    wt.path_index = w.path_index;
    wt.dw.resize(w.dw.size());
    for (int k = 0; k < w.K; ++k)
        for (std::size_t m = 0; m < M; ++m)
            wt.dw[static_cast<std::size_t>(k) * M + m] =
                std::sqrt(delta[m]) * w.increment(k, m);

    auto rescale = [&](const Forcing& src, double expo) {
        Forcing out;
        if (src.zero()) return out;
        out.pieces.reserve(M);
        for (std::size_t m = 0; m < M; ++m) {
            Spectrum s = src.at(m);
            const double c = std::pow(delta[m], expo);
            for (cplx& z : s.coeffs) z *= c;
            out.pieces.push_back(std::move(s));
        }
        return out;
    };
    const Forcing ft = rescale(f, -1.0);
    const Forcing gt = rescale(g, -0.5);

    Trajectory v = solve_additive(u0, ft, gt, drift, beta_times, wt);
    v.times = coeffs.times;  // report on the original clock
    v.coeff_seed = coeffs.seed;
    return v;
}

RegularizationReport regularization_sweep(const Spectrum& u0, const Forcing& f, const Forcing& g,
                                          const CoefficientPath& coeffs, const WienerPath& w,
                                          const std::vector<double>& eps_list, double p) {
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]))
            throw std::invalid_argument("regularization_sweep: eps list must decrease");

    const std::size_t M = coeffs.intervals();
    const Trajectory base = solve_additive(u0, f, g, coeffs, w);

    // Laplacian norms of the base solution, for the remainder bound
    double lap_sum = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        Spectrum lap = base.at(m);
        for (std::size_t i = 0; i < lap.grid.size(); ++i)
            lap.coeffs[i] *= -lap.grid.freq_sq(i);
        lap_sum += std::pow(lp_norm(lap, p), p) * coeffs.dt(m);
    }

    std::vector<double> delta(M);
    for (std::size_t m = 0; m < M; ++m) delta[m] = delta_weight(coeffs, m);

    RegularizationReport rep;
    rep.eps = eps_list;
    for (double eps : eps_list) {
        CoefficientPath pe = coeffs;
        for (std::size_t m = 0; m < M; ++m)
            pe.a[m] = pe.a[m].symmetrized() + SymMat::identity(coeffs.d, eps);
        const Trajectory ue = solve_additive(u0, f, g, pe, w);

        double sup_diff = 0.0;
        double wxx = 0.0;
        for (std::size_t m = 0; m <= M; ++m) {
            Spectrum diff = ue.at(m);
            for (std::size_t i = 0; i < diff.grid.size(); ++i)
                diff.coeffs[i] -= base.at(m).coeffs[i];
            sup_diff = std::max(sup_diff, lp_norm(diff, p));
        }
        for (std::size_t m = 0; m < M; ++m) {
            Spectrum hess(ue.at(m).grid, coeffs.d * coeffs.d);
            const Grid& gr = hess.grid;
            int idx[3];
            for (std::size_t i = 0; i < gr.size(); ++i) {
                gr.unflatten(i, idx);
                for (int ax1 = 0; ax1 < coeffs.d; ++ax1)
                    for (int ax2 = 0; ax2 < coeffs.d; ++ax2)
                        hess.at(i, ax1 * coeffs.d + ax2) =
                            -gr.freq(idx[ax1]) * gr.freq(idx[ax2]) * ue.at(m).coeffs[i];
            }
            wxx += std::pow(lp_norm(hess, p), p) * (delta[m] + eps) * coeffs.dt(m);
        }
        double rem = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            Spectrum lap = base.at(m);
            for (std::size_t i = 0; i < lap.grid.size(); ++i)
                lap.coeffs[i] *= -lap.grid.freq_sq(i);
            rem += std::pow(eps, p) * std::pow(delta[m] + eps, 1.0 - p) *
                   std::pow(lp_norm(lap, p), p) * coeffs.dt(m);
        }
        rep.sup_lp_diff.push_back(sup_diff);
        rep.weighted_uxx_p.push_back(wxx);
        rep.remainder.push_back(rem);
        rep.remainder_bound.push_back(eps * lap_sum);
    }
    rep.monotone = true;
    for (std::size_t i = 0; i + 1 < rep.sup_lp_diff.size(); ++i)
        if (!(rep.sup_lp_diff[i + 1] <= rep.sup_lp_diff[i] + 1e-14)) rep.monotone = false;
    return rep;
}

FeynmanKacResult representation_oracle_spde(const GridField& u0, const Forcing& f,
                                            const Forcing& g, const CoefficientPath& coeffs,
                                            const WienerPath& w, int n_aux_paths,
                                            std::uint64_t aux_seed) {
    if (n_aux_paths < 100)
        throw std::invalid_argument("representation_oracle_spde: need at least 100 paths");
    const Grid& grid = u0.grid;
    const std::size_t M = coeffs.intervals();
    f.validate(M, grid, 1);
    g.validate(M, grid, w.K);

    const Spectrum u0_hat = forward_transform(u0);
    const std::size_t N = grid.size();
    GridField mean(grid), m2(grid);
    int idx[3];

    for (int path = 0; path < n_aux_paths; ++path) {
        const AuxiliaryPath aux =
            auxiliary_increments(coeffs, aux_seed, static_cast<std::uint64_t>(path),
                                 AuxDrift::FullA, 2);
        const std::vector<double> xT = aux.node(2 * M);

        Spectrum acc(grid);
        for (std::size_t i = 0; i < N; ++i) {
            grid.unflatten(i, idx);
            double arg = 0.0;
            for (int ax = 0; ax < grid.d; ++ax)
                arg += grid.freq(idx[ax]) * xT[static_cast<std::size_t>(ax)];
            acc.coeffs[i] = u0_hat.coeffs[i] * std::polar(1.0, arg);
        }
        for (std::size_t m = 0; m < M; ++m) {
            const double dt = coeffs.dt(m);
            const std::vector<double> xmid = aux.node(2 * m + 1);
            const std::vector<double> xleft = aux.node(2 * m);
            for (std::size_t i = 0; i < N; ++i) {
                grid.unflatten(i, idx);
                double arg_mid = 0.0, arg_left = 0.0;
                for (int ax = 0; ax < grid.d; ++ax) {
                    const double xi = grid.freq(idx[ax]);
                    arg_mid += xi * (xT[static_cast<std::size_t>(ax)] -
                                     xmid[static_cast<std::size_t>(ax)]);
                    arg_left += xi * (xT[static_cast<std::size_t>(ax)] -
                                      xleft[static_cast<std::size_t>(ax)]);
                }
                if (!f.zero())
                    acc.coeffs[i] += dt * f.at(m).coeffs[i] * std::polar(1.0, arg_mid);
                if (!g.zero()) {
                    const cplx ph = std::polar(1.0, arg_left);
                    for (int k = 0; k < w.K; ++k)
                        acc.coeffs[i] += g.at(m).at(i, k) * ph * w.increment(k, m);
                }
            }
        }
        const GridField sample = inverse_transform(acc);
        const double inv = 1.0 / (path + 1);
        for (std::size_t i = 0; i < N; ++i) {
            const cplx delta1 = sample.values[i] - mean.values[i];
            mean.values[i] += delta1 * inv;
            const cplx delta2 = sample.values[i] - mean.values[i];
            m2.values[i] += cplx{(std::conj(delta1) * delta2).real(), 0.0};
        }
    }

    FeynmanKacResult out{mean, GridField(grid)};
    for (std::size_t i = 0; i < N; ++i) {
        const double var = std::max(0.0, m2.values[i].real() / std::max(1, n_aux_paths - 1));
        out.std_error.values[i] = std::sqrt(var / n_aux_paths);
    }
    return out;
}

}  // namespace spdelab
