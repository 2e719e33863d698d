#include "spdelab/coefficients.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spdelab/rng.hpp"

namespace spdelab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::ConstantElliptic: return "constant_elliptic";
        case FamilyKind::DegenerateWindow: return "degenerate_window";
        case FamilyKind::VanishingEigenvalue: return "vanishing_eigenvalue";
        case FamilyKind::UnboundedIntegrable: return "unbounded_integrable";
        case FamilyKind::FullyDegenerate: return "fully_degenerate";
        case FamilyKind::RandomPsd: return "random_psd";
    }
    return "unknown";
}

FamilyKind family_from_name(const std::string& s) {
    if (s == "constant_elliptic") return FamilyKind::ConstantElliptic;
    if (s == "degenerate_window") return FamilyKind::DegenerateWindow;
    if (s == "vanishing_eigenvalue") return FamilyKind::VanishingEigenvalue;
    if (s == "unbounded_integrable") return FamilyKind::UnboundedIntegrable;
    if (s == "fully_degenerate") return FamilyKind::FullyDegenerate;
    if (s == "random_psd") return FamilyKind::RandomPsd;
    throw std::invalid_argument("unknown coefficient family: " + s);
}

CoefficientPath sample_path(const CoefficientFamily& family, int d, int K,
                            const std::vector<double>& time_grid, std::uint64_t seed) {
    if (d < 1 || d > 3) throw std::invalid_argument("sample_path: d must be 1..3");
    if (K < 1) throw std::invalid_argument("sample_path: K must be >= 1");
    if (time_grid.size() < 2) throw std::invalid_argument("sample_path: need at least one interval");
    for (std::size_t m = 0; m + 1 < time_grid.size(); ++m)
        if (!(time_grid[m + 1] > time_grid[m]))
            throw std::invalid_argument("sample_path: time grid must be strictly increasing");
    if (family.kind == FamilyKind::UnboundedIntegrable && !(family.theta < 1.0))
        throw std::invalid_argument("sample_path: unbounded_integrable requires theta < 1");
    if (family.kind == FamilyKind::VanishingEigenvalue &&
        (family.degenerate_rank < 1 || family.degenerate_rank > d))
        throw std::invalid_argument("sample_path: degenerate_rank out of range");

    const std::size_t M = time_grid.size() - 1;
    const double T = time_grid.back();
    CoefficientPath path;
    path.times = time_grid;
    path.d = d;
    path.K = K;
    path.family = family_name(family.kind);
    path.seed = seed;
    path.a.assign(M, SymMat(d));
    path.sigma.assign(M, std::vector<double>(static_cast<std::size_t>(d) * K, 0.0));

    Rng rng(seed, 0, "coeff");
    for (std::size_t m = 0; m < M; ++m) {
        switch (family.kind) {
            case FamilyKind::FullyDegenerate:
                break;
            case FamilyKind::ConstantElliptic:
                path.a[m] = SymMat::identity(d, 0.5 * family.kappa);
                break;
            case FamilyKind::DegenerateWindow: {
                const double t_mid = 0.5 * (time_grid[m] + time_grid[m + 1]);
                if (t_mid <= family.window_fraction * T)
                    path.a[m] = SymMat::identity(d, 0.5 * family.kappa);
                break;
            }
            case FamilyKind::VanishingEigenvalue: {
                path.a[m] = SymMat::identity(d, 0.5 * family.kappa);
                if (family.degenerate_stride > 0 &&
                    m % static_cast<std::size_t>(family.degenerate_stride) == 0) {
                    for (int r = 0; r < family.degenerate_rank; ++r)
                        path.a[m](d - 1 - r, d - 1 - r) = 0.0;
                }
                break;
            }
            case FamilyKind::UnboundedIntegrable: {
                const double t_mid = 0.5 * (time_grid[m] + time_grid[m + 1]);
                path.a[m] = SymMat::identity(d, family.scale * std::pow(t_mid, -family.theta));
                break;
            }
            case FamilyKind::RandomPsd: {
                // alpha from a Wishart-style draw, then a = alpha + sigma sigma^T / 2
                const int cols = d + 2;
                double G[3][5];
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < cols; ++j) G[i][j] = rng.normal();
                SymMat alpha(d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        double s = 0.0;
                        for (int k = 0; k < cols; ++k) s += G[i][k] * G[j][k];
                        alpha(i, j) = family.scale * s / cols;
                    }
                auto& sig = path.sigma[m];
                if (family.sigma_scale > 0.0) {
                    const double row_scale = family.sigma_scale / std::sqrt(static_cast<double>(K));
                    for (double& v : sig) v = row_scale * rng.normal();
                }
                SymMat half_ss(d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        double s = 0.0;
                        for (int k = 0; k < K; ++k)
                            s += sig[static_cast<std::size_t>(i) * K + k] *
                                 sig[static_cast<std::size_t>(j) * K + k];
                        half_ss(i, j) = 0.5 * s;
                    }
                path.a[m] = alpha + half_ss;
                break;
            }
        }
    }

    AssumptionReport rep = check_assumptions(path);
    if (!rep.pass())
        throw std::invalid_argument("sample_path: family parameters produced an inadmissible path");
    return path;
}

SymMat alpha_matrix(const CoefficientPath& path, std::size_t m) {
    if (m >= path.intervals()) throw std::out_of_range("alpha_matrix: interval out of range");
    const int d = path.d;
    const int K = path.K;
    SymMat alpha = path.a[m].symmetrized();
    const auto& sig = path.sigma[m];
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < K; ++k)
                s += sig[static_cast<std::size_t>(i) * K + k] *
                     sig[static_cast<std::size_t>(j) * K + k];
            alpha(i, j) -= 0.5 * s;
        }
    return alpha.symmetrized();
}

double sigma_sup(const CoefficientPath& path, std::size_t m) {
    if (m >= path.intervals()) throw std::out_of_range("sigma_sup: interval out of range");
    double best = 0.0;
    for (int i = 0; i < path.d; ++i) {
        double s = 0.0;
        for (int k = 0; k < path.K; ++k) {
            const double v = path.sigma[m][static_cast<std::size_t>(i) * path.K + k];
            s += v * v;
        }
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

double delta_weight(const CoefficientPath& path, std::size_t m) {
    return std::max(0.0, smallest_eigenvalue(alpha_matrix(path, m)));
}

double weight_value(double delta, double sigma_sup_val, WeightKind kind, double p) {
    if (!(p >= 2.0)) throw std::invalid_argument("weight: p must be >= 2");
    switch (kind) {
        case WeightKind::One:
            return 1.0;
        case WeightKind::Delta:
            return delta;
        case WeightKind::DeltaOneMinusP:
            return delta > 0.0 ? std::pow(delta, 1.0 - p) : kInf;
        case WeightKind::DeltaOneMinusHalfP:
            if (p == 2.0) return 1.0;  // delta^0 := 1 even at delta = 0
            return delta > 0.0 ? std::pow(delta, 1.0 - 0.5 * p) : kInf;
        case WeightKind::SigmaPDeltaOneMinusP: {
            const double sp = std::pow(sigma_sup_val, p);
            if (delta > 0.0) return sp * std::pow(delta, 1.0 - p);
            return sp == 0.0 ? 0.0 : kInf;
        }
        case WeightKind::SigmaP:
            return std::pow(sigma_sup_val, p);
    }
    return 0.0;
}

double weight(const CoefficientPath& path, WeightKind kind, double p, std::size_t m) {
    return weight_value(delta_weight(path, m), sigma_sup(path, m), kind, p);
}

AssumptionReport check_assumptions(const CoefficientPath& path) {
    AssumptionReport rep;
    rep.min_alpha_eigenvalue = kInf;
    for (std::size_t m = 0; m < path.intervals(); ++m) {
        const double ev = smallest_eigenvalue(alpha_matrix(path, m));
        rep.min_alpha_eigenvalue = std::min(rep.min_alpha_eigenvalue, ev);
        double sig2 = 0.0;
        for (double v : path.sigma[m]) sig2 += v * v;
        rep.a_integral += path.a[m].max_abs() * path.dt(m);
        rep.sigma_sq_integral += sig2 * path.dt(m);
    }
    if (path.intervals() == 0) rep.min_alpha_eigenvalue = 0.0;
    rep.psd_ok = rep.min_alpha_eigenvalue >= -1e-12;
    rep.integrable_ok = std::isfinite(rep.a_integral) && std::isfinite(rep.sigma_sq_integral);
    return rep;
}

double weighted_term(double term, double w) {
    if (std::isinf(w)) return term == 0.0 ? 0.0 : kInf;
    return term * w;
}

}  // namespace spdelab
