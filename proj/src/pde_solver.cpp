#include "spdelab/pde_solver.hpp"

#include <cmath>
#include <stdexcept>

#include "spdelab/drivers.hpp"

namespace spdelab {

namespace {

// (1 - e^{-q dt}) / q with the q -> 0 limit dt.
double duhamel_factor(double q, double dt) {
    if (std::abs(q * dt) < 1e-12) return dt;
    return -std::expm1(-q * dt) / q;
}

// a_m xi xi for every mode of the grid.
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

}  // namespace

void Forcing::validate(std::size_t intervals, const Grid& grid, int arity) const {
    if (pieces.empty()) return;
    if (pieces.size() != 1 && pieces.size() != intervals)
        throw std::invalid_argument("Forcing: need 0, 1, or M pieces");
    for (const Spectrum& s : pieces) {
        if (!(s.grid == grid)) throw std::invalid_argument("Forcing: grid mismatch");
        if (s.arity != arity) throw std::invalid_argument("Forcing: arity mismatch");
        if (!s.finite()) throw std::invalid_argument("Forcing: non-finite data");
    }
}

Spectrum evolve_multiplier(const Spectrum& spec, const CoefficientPath& coeffs, double s, double t) {
    if (!(s <= t)) throw std::invalid_argument("evolve_multiplier: requires s <= t");
    if (s < coeffs.times.front() - 1e-12 || t > coeffs.times.back() + 1e-12)
        throw std::invalid_argument("evolve_multiplier: [s,t] outside coefficient horizon");
    // integrated matrix over [s,t], exact for piecewise constants
    SymMat acc(coeffs.d);
    for (std::size_t m = 0; m < coeffs.intervals(); ++m) {
        const double lo = std::max(s, coeffs.times[m]);
        const double hi = std::min(t, coeffs.times[m + 1]);
        if (hi > lo) acc = acc + coeffs.a[m].symmetrized().scaled(hi - lo);
    }
    Spectrum out = spec;
    const std::vector<double> q = mode_quadratic(spec.grid, acc);
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        const double m = std::exp(-q[i]);
        for (int c = 0; c < spec.arity; ++c) out.at(i, c) *= m;
    }
    return out;
}

Trajectory solve_deterministic(const Spectrum& u0, const Forcing& f, const CoefficientPath& coeffs) {
    if (!u0.finite()) throw std::invalid_argument("solve_deterministic: non-finite initial data");
    f.validate(coeffs.intervals(), u0.grid, u0.arity);

    Trajectory traj;
    traj.times = coeffs.times;
    traj.coeff_seed = coeffs.seed;
    traj.states.reserve(coeffs.times.size());
    traj.states.push_back(u0);

    Spectrum cur = u0;
    for (std::size_t m = 0; m < coeffs.intervals(); ++m) {
        const double dt = coeffs.dt(m);
        const std::vector<double> q = mode_quadratic(u0.grid, coeffs.a[m].symmetrized());
        const Spectrum* fm = f.zero() ? nullptr : &f.at(m);
        Spectrum next = cur;
        for (std::size_t i = 0; i < u0.grid.size(); ++i) {
            const double decay = std::exp(-q[i] * dt);
            const double duh = duhamel_factor(q[i], dt);
            for (int c = 0; c < u0.arity; ++c) {
                cplx v = decay * cur.at(i, c);
                if (fm) v += duh * fm->at(i, c);
                next.at(i, c) = v;
            }
        }
        cur = std::move(next);
        traj.states.push_back(cur);
    }
    return traj;
}

FeynmanKacResult feynman_kac_oracle(const GridField& u0, const Forcing& f,
                                    const CoefficientPath& coeffs, int n_paths,
                                    std::uint64_t aux_seed) {
    if (n_paths < 100)
        throw std::invalid_argument("feynman_kac_oracle: need at least 100 paths");
    const Grid& g = u0.grid;
    if (u0.arity != 1) throw std::invalid_argument("feynman_kac_oracle: scalar fields only");
    f.validate(coeffs.intervals(), g, 1);

    const Spectrum u0_hat = forward_transform(u0);
    std::vector<Spectrum> f_hat;  // resolved per interval
    const std::size_t M = coeffs.intervals();

    const std::size_t N = g.size();
    GridField mean(g), m2(g);
    std::vector<cplx> shifted(N);
    int idx[3];
    double xi[3];

    for (int path = 0; path < n_paths; ++path) {
        // substeps = 2 provides interval midpoints for the time quadrature
        const AuxiliaryPath aux =
            auxiliary_increments(coeffs, aux_seed, static_cast<std::uint64_t>(path),
                                 AuxDrift::FullA, 2);
        const std::vector<double> xT = aux.node(2 * M);

        Spectrum acc(g);
        for (std::size_t i = 0; i < N; ++i) {
            g.unflatten(i, idx);
            double phase = 0.0;
            for (int ax = 0; ax < g.d; ++ax) {
                xi[ax] = g.freq(idx[ax]);
                phase += xi[ax] * xT[static_cast<std::size_t>(ax)];
            }
            acc.coeffs[i] = u0_hat.coeffs[i] * std::polar(1.0, phase);
        }
        if (!f.zero()) {
            for (std::size_t m = 0; m < M; ++m) {
                const Spectrum& fh = f.at(m);
                const std::vector<double> xmid = aux.node(2 * m + 1);
                const double dt = coeffs.dt(m);
                for (std::size_t i = 0; i < N; ++i) {
                    g.unflatten(i, idx);
                    double phase = 0.0;
                    for (int ax = 0; ax < g.d; ++ax)
                        phase += g.freq(idx[ax]) * (xT[static_cast<std::size_t>(ax)] -
                                                    xmid[static_cast<std::size_t>(ax)]);
                    acc.coeffs[i] += dt * fh.coeffs[i] * std::polar(1.0, phase);
                }
            }
        }
        const GridField sample = inverse_transform(acc);
        // Welford accumulation, deterministic path order
        const double inv = 1.0 / (path + 1);
        for (std::size_t i = 0; i < N; ++i) {
            const cplx delta1 = sample.values[i] - mean.values[i];
            mean.values[i] += delta1 * inv;
            const cplx delta2 = sample.values[i] - mean.values[i];
            m2.values[i] += cplx{(std::conj(delta1) * delta2).real(), 0.0};
        }
    }

    FeynmanKacResult out{mean, GridField(g)};
    for (std::size_t i = 0; i < N; ++i) {
        const double var = std::max(0.0, m2.values[i].real() / std::max(1, n_paths - 1));
        out.std_error.values[i] = std::sqrt(var / n_paths);
    }
    return out;
}

GridField mollify(const GridField& field, double eps) {
    const Grid& g = field.grid;
    if (!(eps > 0.0) || eps > g.L / 4.0)
        throw std::invalid_argument("mollify: eps must lie in (0, L/4]");
    // sampled bump kernel, normalized to unit discrete mass
    GridField kern(g);
    int idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        double r2 = 0.0;
        for (int ax = 0; ax < g.d; ++ax) {
            double x = idx[ax] * g.h();
            if (x > g.L / 2.0) x -= g.L;  // wrap to [-L/2, L/2)
            const double s = x / eps;
            r2 += s * s;
        }
        kern.values[i] = (r2 < 1.0) ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    }
    double mass = 0.0;
    for (const cplx& z : kern.values) mass += z.real();
    mass *= std::pow(g.h(), g.d);
    if (!(mass > 0.0)) throw std::runtime_error("mollify: kernel underresolved on this grid");
    for (cplx& z : kern.values) z /= mass;

    const Spectrum k_hat = forward_transform(kern);
    Spectrum u_hat = forward_transform(field);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (int c = 0; c < field.arity; ++c) u_hat.at(i, c) *= k_hat.coeffs[i];
    return inverse_transform(u_hat);
}

}  // namespace spdelab
