#include "spdelab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "spdelab/rng.hpp"

namespace spdelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

McEstimate mean_and_stderr(const std::vector<double>& samples) {
    McEstimate est;
    const std::size_t n = samples.size();
    if (n == 0) return est;
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
    est.value = mean;
    est.std_error = std::sqrt(var / static_cast<double>(n));
    return est;
}

std::uint64_t coeff_stream(std::uint64_t seed, int path) {
    return stream_key(seed, static_cast<std::uint64_t>(path), "coeff-path");
}

// sum_m ||field(t_m)||^p w_m dt_m with 0*inf := 0
double weighted_time_sum(const Trajectory& traj, const CoefficientPath& coeffs,
                         const WeightedNormSpec& spec) {
    double acc = 0.0;
    for (std::size_t m = 0; m < coeffs.intervals(); ++m) {
        const double w = weight_value(delta_weight(coeffs, m), sigma_sup(coeffs, m),
                                      spec.kind, spec.p);
        if (std::isinf(w)) {
            const double nv = sobolev_norm(traj.at(m), spec.gamma, spec.p);
            if (nv > 0.0) return kInf;
            continue;
        }
        if (w == 0.0) continue;
        const double nv = sobolev_norm(traj.at(m), spec.gamma, spec.p);
        acc += std::pow(nv, spec.p) * w * coeffs.dt(m);
    }
    return acc;
}

}  // namespace

McEstimate weighted_spacetime_norm(const std::vector<Trajectory>& trajs,
                                   const std::vector<const CoefficientPath*>& coeffs,
                                   const WeightedNormSpec& spec) {
    if (trajs.empty()) throw std::invalid_argument("weighted_spacetime_norm: empty trajectory set");
    if (coeffs.size() != trajs.size())
        throw std::invalid_argument("weighted_spacetime_norm: coefficient list size mismatch");
    std::vector<double> inner(trajs.size());
    bool infinite = false;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        inner[i] = weighted_time_sum(trajs[i], *coeffs[i], spec);
        if (std::isinf(inner[i])) infinite = true;
    }
    if (infinite) return {kInf, 0.0};
    McEstimate raw = mean_and_stderr(inner);
    McEstimate out;
    out.value = std::pow(raw.value, 1.0 / spec.p);
    out.std_error = raw.value > 0.0
                        ? raw.std_error / (spec.p * std::pow(raw.value, 1.0 - 1.0 / spec.p))
                        : 0.0;
    return out;
}

McEstimate sup_norm_expectation(const std::vector<Trajectory>& trajs, double gamma, double p) {
    if (trajs.empty()) throw std::invalid_argument("sup_norm_expectation: empty trajectory set");
    std::vector<double> sups(trajs.size());
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        double best = 0.0;
        for (const Spectrum& s : trajs[i].states)
            best = std::max(best, sobolev_norm(s, gamma, p));
        sups[i] = std::pow(best, p);
    }
    return mean_and_stderr(sups);
}

Trajectory hessian_trajectory(const Trajectory& traj, int d) {
    Trajectory out;
    out.times = traj.times;
    out.coeff_seed = traj.coeff_seed;
    out.wiener_seed = traj.wiener_seed;
    out.path_index = traj.path_index;
    out.states.reserve(traj.states.size());
    int idx[3];
    for (const Spectrum& s : traj.states) {
        if (s.arity != 1) throw std::invalid_argument("hessian_trajectory: scalar states only");
        Spectrum h(s.grid, d * d);
        const Grid& g = s.grid;
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.unflatten(i, idx);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    h.at(i, a * d + b) = -g.freq(idx[a]) * g.freq(idx[b]) * s.coeffs[i];
        }
        out.states.push_back(std::move(h));
    }
    return out;
}

Spectrum gradient_spectrum(const Spectrum& g_hat, int d) {
    Spectrum out(g_hat.grid, g_hat.arity * d);
    const Grid& g = g_hat.grid;
    int idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        for (int k = 0; k < g_hat.arity; ++k)
            for (int ax = 0; ax < d; ++ax)
                out.at(i, k * d + ax) = cplx{0.0, g.freq(idx[ax])} * g_hat.at(i, k);
    }
    return out;
}

std::string EstimateReport::csv_header() {
    return "experiment_id,family,d,p,gamma,K,T,n_grid,n_time,n_paths,lhs,rhs_u0,rhs_f,"
           "rhs_gx_sigma,rhs_gx_delta,rhs_total,ratio,lhs_stderr,seed";
}

std::string EstimateReport::csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << experiment_id << ',' << family << ',' << d << ',' << p << ',' << gamma << ',' << K << ','
       << T << ',' << n_grid << ',' << n_time << ',' << n_paths << ',' << lhs << ',' << rhs_u0
       << ',' << rhs_f << ',' << rhs_gx_sigma << ',' << rhs_gx_delta << ',' << rhs_total << ','
       << ratio << ',' << lhs_stderr << ',' << seed;
    return os.str();
}

namespace {

EstimateReport report_shell(const EstimateConfig& c) {
    EstimateReport r;
    r.experiment_id = c.experiment_id;
    r.family = family_name(c.family.kind);
    r.d = c.grid.d;
    r.p = c.p;
    r.gamma = c.gamma;
    r.K = c.K;
    r.T = c.times.back();
    r.n_grid = c.grid.n;
    r.n_time = static_cast<int>(c.times.size()) - 1;
    r.n_paths = c.n_paths;
    r.seed = c.seed;
    return r;
}

}  // namespace

EstimateReport verify_estimate_A(const EstimateConfig& c) {
    EstimateReport r = report_shell(c);
    const std::size_t M = c.times.size() - 1;

    // deterministic-data RHS pieces (f, g terms carry no weight)
    double f_term = 0.0, g_term = 0.0;
    std::vector<double> gx_norm_p(M, 0.0);  // ||g_x(t_m)||^p, reused per path
    for (std::size_t m = 0; m < M; ++m) {
        const double dt = c.times[m + 1] - c.times[m];
        if (!c.f.zero()) f_term += std::pow(sobolev_norm(c.f.at(m), c.gamma, c.p), c.p) * dt;
        if (!c.g.zero()) {
            g_term += std::pow(sobolev_norm(c.g.at(m), c.gamma, c.p), c.p) * dt;
            gx_norm_p[m] =
                std::pow(sobolev_norm(gradient_spectrum(c.g.at(m), c.grid.d), c.gamma, c.p), c.p);
        }
    }

    std::vector<double> sup_p(c.n_paths), gx_sigma(c.n_paths, 0.0);
    parallel_paths(c.n_paths, [&](int path) {
        const CoefficientPath coeffs =
            sample_path(c.family, c.grid.d, c.K, c.times, coeff_stream(c.seed, path));
        const WienerPath w =
            sample_wiener(c.K, c.times, c.seed, static_cast<std::uint64_t>(path));
        const Trajectory traj = solve_full(c.u0, c.f, c.g, coeffs, w);
        double best = 0.0;
        for (const Spectrum& s : traj.states) best = std::max(best, sobolev_norm(s, c.gamma, c.p));
        sup_p[path] = std::pow(best, c.p);
        if (!c.g.zero()) {
            double acc = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                acc += gx_norm_p[m] * std::pow(sigma_sup(coeffs, m), c.p) * coeffs.dt(m);
            gx_sigma[path] = acc;
        }
    });

    const McEstimate lhs = mean_and_stderr(sup_p);
    r.lhs = lhs.value;
    r.lhs_stderr = lhs.std_error;
    r.rhs_u0 = std::pow(sobolev_norm(c.u0, c.gamma, c.p), c.p);
    r.rhs_f = f_term;
    r.rhs_gx_delta = g_term;  // the plain g term of estimate A
    r.rhs_gx_sigma = mean_and_stderr(gx_sigma).value;
    r.rhs_total = r.rhs_u0 + r.rhs_f + r.rhs_gx_delta + r.rhs_gx_sigma;
    if (r.rhs_total == 0.0) {
        r.violation = r.lhs > 1e-20;
        r.ratio = 0.0;
    } else {
        r.ratio = r.lhs / r.rhs_total;
    }
    return r;
}

EstimateReport verify_estimate_B(const EstimateConfig& c) {
    EstimateReport r = report_shell(c);
    const std::size_t M = c.times.size() - 1;
    const int d = c.grid.d;

    std::vector<double> f_norm_p(M, 0.0), gx_norm_p(M, 0.0);
    for (std::size_t m = 0; m < M; ++m) {
        if (!c.f.zero()) f_norm_p[m] = std::pow(sobolev_norm(c.f.at(m), c.gamma, c.p), c.p);
        if (!c.g.zero())
            gx_norm_p[m] =
                std::pow(sobolev_norm(gradient_spectrum(c.g.at(m), d), c.gamma, c.p), c.p);
    }

    std::vector<double> lhs_p(c.n_paths, 0.0), f_term(c.n_paths, 0.0),
        gx_sig(c.n_paths, 0.0), gx_del(c.n_paths, 0.0);
    parallel_paths(c.n_paths, [&](int path) {
        const CoefficientPath coeffs =
            sample_path(c.family, d, c.K, c.times, coeff_stream(c.seed, path));
        const WienerPath w =
            sample_wiener(c.K, c.times, c.seed, static_cast<std::uint64_t>(path));
        const Trajectory traj = solve_full(c.u0, c.f, c.g, coeffs, w);
        const Trajectory hess = hessian_trajectory(traj, d);
        double lhs_acc = 0.0, f_acc = 0.0, gs_acc = 0.0, gd_acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const double dt = coeffs.dt(m);
            const double delta = delta_weight(coeffs, m);
            const double ssup = sigma_sup(coeffs, m);
            lhs_acc += std::pow(sobolev_norm(hess.at(m), c.gamma, c.p), c.p) * delta * dt;
            f_acc += weighted_term(f_norm_p[m],
                                   weight_value(delta, ssup, WeightKind::DeltaOneMinusP, c.p)) * dt;
            gs_acc += weighted_term(
                          gx_norm_p[m],
                          weight_value(delta, ssup, WeightKind::SigmaPDeltaOneMinusP, c.p)) * dt;
            gd_acc += weighted_term(
                          gx_norm_p[m],
                          weight_value(delta, ssup, WeightKind::DeltaOneMinusHalfP, c.p)) * dt;
        }
        lhs_p[path] = lhs_acc;
        f_term[path] = f_acc;
        gx_sig[path] = gs_acc;
        gx_del[path] = gd_acc;
    });

    auto root_mean = [&](const std::vector<double>& v) {
        for (double x : v)
            if (std::isinf(x)) return kInf;
        return std::pow(mean_and_stderr(v).value, 1.0 / c.p);
    };

    const McEstimate lhs_raw = mean_and_stderr(lhs_p);
    r.lhs = std::pow(lhs_raw.value, 1.0 / c.p);
    r.lhs_stderr = lhs_raw.value > 0.0
                       ? lhs_raw.std_error / (c.p * std::pow(lhs_raw.value, 1.0 - 1.0 / c.p))
                       : 0.0;

    const DyadicPartition part = build_partition(c.grid);
    r.rhs_u0 = besov_norm(c.u0, c.gamma + 2.0 * (1.0 - 1.0 / c.p), c.p, part);
    r.rhs_f = root_mean(f_term);
    r.rhs_gx_sigma = root_mean(gx_sig);
    r.rhs_gx_delta = root_mean(gx_del);
    r.rhs_total = r.rhs_u0 + r.rhs_f + r.rhs_gx_sigma + r.rhs_gx_delta;
    r.vacuous = std::isinf(r.rhs_total);
    if (r.vacuous) {
        r.ratio = 0.0;
    } else if (r.rhs_total == 0.0) {
        r.violation = r.lhs > 1e-20;
        r.ratio = 0.0;
    } else {
        r.ratio = r.lhs / r.rhs_total;
    }
    return r;
}

void fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                double& residual) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_loglog: need matching data, n >= 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::log(y[i]) - (intercept + slope * std::log(x[i]));
        rss += e * e;
    }
    residual = std::sqrt(rss / n);
}

SlopeReport kappa_scaling_experiment(DataTerm term, double p, double T, int n_time, int n_paths,
                                     std::uint64_t seed) {
    SlopeReport rep;
    rep.kappas = {0.25, 0.5, 1.0, 2.0, 4.0};
    switch (term) {
        case DataTerm::InitialData: rep.expected = -1.0 / p; break;
        case DataTerm::Drift: rep.expected = -1.0; break;
        case DataTerm::Noise: rep.expected = -0.5; break;
    }

    const Grid grid(1, 16, 2.0 * 3.14159265358979323846);
    std::vector<double> times(static_cast<std::size_t>(n_time) + 1);
    for (int m = 0; m <= n_time; ++m) times[m] = T * m / n_time;

    // single-mode data sin(x)
    GridField mode(grid);
    for (int j = 0; j < grid.n; ++j) mode.values[j] = std::sin(j * grid.h());
    const Spectrum mode_hat = forward_transform(mode);

    Spectrum u0(grid);
    Forcing f, g;
    switch (term) {
        case DataTerm::InitialData: u0 = mode_hat; break;
        case DataTerm::Drift: f.pieces.push_back(mode_hat); break;
        case DataTerm::Noise: {
            Spectrum gk(grid, 1);
            gk.coeffs = mode_hat.coeffs;
            g.pieces.push_back(std::move(gk));
            break;
        }
    }
    const int paths = (term == DataTerm::Noise) ? n_paths : 1;

    for (double kappa : rep.kappas) {
        CoefficientFamily fam;
        fam.kind = FamilyKind::ConstantElliptic;
        fam.kappa = kappa;
        const CoefficientPath coeffs = sample_path(fam, 1, 1, times, seed);

        std::vector<double> vals(paths, 0.0);
        parallel_paths(paths, [&](int path) {
            // common random numbers across kappa: stream keyed by path only
            const WienerPath w =
                sample_wiener(1, times, seed, static_cast<std::uint64_t>(path));
            const Trajectory traj = solve_additive(u0, f, g, coeffs, w);
            const Trajectory hess = hessian_trajectory(traj, 1);
            // trapezoidal time quadrature to keep the initial transient unbiased
            double acc = 0.0;
            for (std::size_t m = 0; m < traj.times.size(); ++m) {
                double wq = 0.0;
                if (m > 0) wq += 0.5 * (traj.times[m] - traj.times[m - 1]);
                if (m + 1 < traj.times.size()) wq += 0.5 * (traj.times[m + 1] - traj.times[m]);
                acc += std::pow(lp_norm(hess.at(m), p), p) * wq;
            }
            vals[path] = acc;
        });
        rep.norms.push_back(std::pow(mean_and_stderr(vals).value, 1.0 / p));
    }

    fit_loglog(rep.kappas, rep.norms, rep.slope, rep.residual);
    rep.conclusive = rep.residual < 0.05;
    return rep;
}

SharpnessReport sharpness_experiment(const Grid& grid, const std::vector<double>& times, int K,
                                     const Spectrum& u0, const Forcing& f, const Forcing& g,
                                     int n_paths, std::uint64_t seed) {
    const std::size_t M = times.size() - 1;
    f.validate(M, grid, 1);
    g.validate(M, grid, K);

    CoefficientFamily fam;
    fam.kind = FamilyKind::FullyDegenerate;

    SharpnessReport rep;
    std::vector<double> id_err(n_paths, 0.0), gain(n_paths, 0.0), sup_p(n_paths, 0.0);
    parallel_paths(n_paths, [&](int path) {
        const CoefficientPath coeffs =
            sample_path(fam, grid.d, K, times, coeff_stream(seed, path));
        const WienerPath w = sample_wiener(K, times, seed, static_cast<std::uint64_t>(path));
        const Trajectory traj = solve_full(u0, f, g, coeffs, w);

        // direct data combination u0 + int f + sum_k int g^k dw^k
        Spectrum direct = u0;
        for (std::size_t m = 0; m < M; ++m) {
            const double dt = times[m + 1] - times[m];
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (!f.zero()) direct.coeffs[i] += f.at(m).coeffs[i] * dt;
                if (!g.zero())
                    for (int k = 0; k < K; ++k)
                        direct.coeffs[i] += g.at(m).at(i, k) * w.increment(k, m);
            }
        }
        Spectrum diff = traj.back();
        for (std::size_t i = 0; i < grid.size(); ++i) diff.coeffs[i] -= direct.coeffs[i];
        id_err[path] = lp_norm(diff, 2.0);
        gain[path] = std::abs(sobolev_norm(traj.back(), 2.0, 2.0) - sobolev_norm(direct, 2.0, 2.0));
        double best = 0.0;
        for (const Spectrum& s : traj.states) best = std::max(best, sobolev_norm(s, 0.0, 2.0));
        sup_p[path] = best * best;
    });

    for (int i = 0; i < n_paths; ++i) {
        rep.max_identity_error = std::max(rep.max_identity_error, id_err[i]);
        rep.max_smoothing_gain = std::max(rep.max_smoothing_gain, gain[i]);
    }
    double rhs = std::pow(lp_norm(u0, 2.0), 2.0);
    for (std::size_t m = 0; m < M; ++m) {
        const double dt = times[m + 1] - times[m];
        if (!f.zero()) rhs += std::pow(lp_norm(f.at(m), 2.0), 2.0) * dt;
        if (!g.zero()) rhs += std::pow(lp_norm(g.at(m), 2.0), 2.0) * dt;
    }
    const double lhs = mean_and_stderr(sup_p).value;
    rep.estimate_a_ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    rep.pass = rep.max_identity_error < 1e-12 && rep.max_smoothing_gain < 1e-10;
    return rep;
}

void parallel_paths(int n, const std::function<void(int)>& fn) {
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* env = std::getenv("SPDE_LAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) threads = std::min(threads, cap);
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

}  // namespace spdelab
