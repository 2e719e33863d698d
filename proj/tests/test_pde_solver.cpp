#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spdelab/pde_solver.hpp"
#include "spdelab/rng.hpp"

using namespace spdelab;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> uniform_times(double T, int M) {
    std::vector<double> t(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) t[m] = T * m / M;
    return t;
}

CoefficientPath constant_path(int d, double a_scale, double T, int M) {
    CoefficientPath path;
    path.times = uniform_times(T, M);
    path.d = d;
    path.K = 1;
    path.a.assign(static_cast<std::size_t>(M), SymMat::identity(d, a_scale));
    path.sigma.assign(static_cast<std::size_t>(M), std::vector<double>(d, 0.0));
    return path;
}

GridField sin_field(const Grid& g) {
    GridField f(g);
    for (int j = 0; j < g.n; ++j) f.values[j] = std::sin(j * g.h());
    return f;
}

}  // namespace

TEST_CASE("evolve multiplier") {
    const Grid g(1, 64, 2.0 * kPi);
    const Spectrum s = forward_transform(sin_field(g));

    SUBCASE("a = 0 is the identity") {
        CoefficientPath path = constant_path(1, 0.0, 1.0, 4);
        const Spectrum out = evolve_multiplier(s, path, 0.0, 1.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(out.coeffs[i] - s.coeffs[i]) < 1e-14);
    }
    SUBCASE("heat factor e^{-1/2} on sin") {
        CoefficientPath path = constant_path(1, 0.5, 1.0, 4);
        const GridField out = inverse_transform(evolve_multiplier(s, path, 0.0, 1.0));
        for (int j = 0; j < g.n; ++j)
            CHECK(std::abs(out.values[j] - std::exp(-0.5) * std::sin(j * g.h())) < 1e-12);
    }
    SUBCASE("degenerate direction diag(1,0)") {
        const Grid g2(2, 16, 2.0 * kPi);
        CoefficientPath path = constant_path(2, 0.0, 1.0, 1);
        path.a[0](0, 0) = 1.0;  // diag(1, 0)
        Spectrum mode(g2);
        int idx[3] = {0, 3, 0};  // xi = (0, 3): untouched
        mode.coeffs[g2.flatten(idx)] = 1.0;
        int idx2[3] = {2, 0, 0};  // xi = (2, 0): damped by e^{-4t}
        mode.coeffs[g2.flatten(idx2)] = 1.0;
        const Spectrum out = evolve_multiplier(mode, path, 0.0, 1.0);
        CHECK(std::abs(out.coeffs[g2.flatten(idx)] - 1.0) < 1e-14);
        CHECK(std::abs(out.coeffs[g2.flatten(idx2)] - std::exp(-4.0)) < 1e-14);
    }
    SUBCASE("semigroup composition") {
        CoefficientPath path = constant_path(1, 0.7, 1.0, 8);
        const Spectrum two_leg = evolve_multiplier(evolve_multiplier(s, path, 0.0, 0.375),
                                                   path, 0.375, 1.0);
        const Spectrum one_leg = evolve_multiplier(s, path, 0.0, 1.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(two_leg.coeffs[i] - one_leg.coeffs[i]) < 1e-13);
    }
    SUBCASE("s > t rejected") {
        CoefficientPath path = constant_path(1, 0.5, 1.0, 4);
        CHECK_THROWS_AS(evolve_multiplier(s, path, 0.8, 0.2), std::invalid_argument);
    }
}

TEST_CASE("deterministic solve") {
    const Grid g(1, 64, 2.0 * kPi);

    SUBCASE("DC mode integrates constant forcing to c t") {
        CoefficientPath path = constant_path(1, 1.3, 2.0, 16);
        GridField c(g);
        for (cplx& z : c.values) z = 0.75;
        Forcing f;
        f.pieces.push_back(forward_transform(c));
        const Trajectory traj = solve_deterministic(Spectrum(g), f, path);
        for (std::size_t m = 0; m < traj.times.size(); ++m) {
            const GridField u = inverse_transform(traj.at(m));
            for (const cplx& z : u.values)
                CHECK(std::abs(z - 0.75 * traj.times[m]) < 1e-12);
        }
    }
    SUBCASE("a = 0: u = u0 + int f with no smoothing in any H^s") {
        CoefficientPath path = constant_path(1, 0.0, 1.0, 8);
        const Spectrum u0 = forward_transform(sin_field(g));
        GridField fcos(g);
        for (int j = 0; j < g.n; ++j) fcos.values[j] = std::cos(2.0 * j * g.h());
        Forcing f;
        f.pieces.push_back(forward_transform(fcos));
        const Trajectory traj = solve_deterministic(u0, f, path);
        Spectrum expect = u0;
        for (std::size_t i = 0; i < g.size(); ++i)
            expect.coeffs[i] += f.pieces[0].coeffs[i];  // t = 1
        for (double s : {0.0, 1.0, 2.5}) {
            CHECK(sobolev_norm(traj.back(), s, 2.0) ==
                  doctest::Approx(sobolev_norm(expect, s, 2.0)).epsilon(1e-13));
        }
        double max_diff = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            max_diff = std::max(max_diff, std::abs(traj.back().coeffs[i] - expect.coeffs[i]));
        CHECK(max_diff < 1e-13);
    }
    SUBCASE("heat flow of a Gaussian matches the closed form") {
        const Grid gw(1, 256, 20.0);
        CoefficientPath path = constant_path(1, 0.5, 0.5, 32);
        GridField u0(gw);
        for (int j = 0; j < gw.n; ++j) {
            const double x = j * gw.h() - gw.L / 2.0;
            u0.values[j] = std::exp(-x * x / 2.0);
        }
        const Trajectory traj = solve_deterministic(forward_transform(u0), Forcing{}, path);
        const GridField out = inverse_transform(traj.back());
        // variance 1 -> 1 + 2 a t = 1.5; periodized images summed explicitly
        const double v = 1.5, amp = 1.0 / std::sqrt(v);
        for (int j = 0; j < gw.n; ++j) {
            const double x = j * gw.h() - gw.L / 2.0;
            double ref = 0.0;
            for (int im = -3; im <= 3; ++im)
                ref += amp * std::exp(-(x + im * gw.L) * (x + im * gw.L) / (2.0 * v));
            CHECK(std::abs(out.values[j] - ref) < 1e-10);
        }
    }
    SUBCASE("L2 contraction with f = 0") {
        CoefficientPath path = constant_path(1, 0.9, 1.0, 16);
        Rng rng(8, 0, "test");
        GridField u0(g);
        for (cplx& z : u0.values) z = cplx{rng.normal(), 0.0};
        const Trajectory traj = solve_deterministic(forward_transform(u0), Forcing{}, path);
        double prev = lp_norm(traj.at(0), 2.0);
        for (std::size_t m = 1; m < traj.times.size(); ++m) {
            const double cur = lp_norm(traj.at(m), 2.0);
            CHECK(cur <= prev + 1e-13);
            prev = cur;
        }
        // p = 4 contraction via the positive heat kernel
        CHECK(lp_norm(inverse_transform(traj.back()), 4.0) <=
              lp_norm(u0, 4.0) * (1.0 + 1e-10));
    }
}

TEST_CASE("feynman-kac oracle") {
    SUBCASE("a = 0 reproduces the data combination with zero variance") {
        const Grid g(1, 32, 2.0 * kPi);
        CoefficientPath path = constant_path(1, 0.0, 1.0, 4);
        const GridField u0 = sin_field(g);
        GridField fconst(g);
        for (cplx& z : fconst.values) z = 0.5;
        Forcing f;
        f.pieces.push_back(forward_transform(fconst));
        const FeynmanKacResult res = feynman_kac_oracle(u0, f, path, 200, 1);
        for (int j = 0; j < g.n; ++j) {
            CHECK(std::abs(res.mean.values[j] - (std::sin(j * g.h()) + 0.5)) < 1e-12);
            CHECK(res.std_error.values[j].real() < 1e-13);
        }
    }
    SUBCASE("heat case agrees with the spectral solution within 3 standard errors") {
        const Grid g(1, 64, 2.0 * kPi);
        CoefficientPath path = constant_path(1, 0.5, 1.0, 8);
        const GridField u0 = sin_field(g);
        const FeynmanKacResult res = feynman_kac_oracle(u0, Forcing{}, path, 5000, 2);
        for (int j = 0; j < g.n; ++j) {
            const double exact = std::exp(-0.5) * std::sin(j * g.h());
            const double se = std::max(res.std_error.values[j].real(), 1e-12);
            CHECK(std::abs(res.mean.values[j] - exact) < 3.0 * se);
        }
    }
    SUBCASE("forcing-only case agrees with Duhamel within 3 standard errors") {
        const Grid g(1, 64, 2.0 * kPi);
        CoefficientPath path = constant_path(1, 0.5, 1.0, 16);
        Forcing f;
        f.pieces.push_back(forward_transform(sin_field(g)));
        const Trajectory ref = solve_deterministic(Spectrum(g), f, path);
        const GridField exact = inverse_transform(ref.back());
        const FeynmanKacResult res =
            feynman_kac_oracle(GridField(g), f, path, 5000, 3);
        for (int j = 0; j < g.n; ++j) {
            const double se = std::max(res.std_error.values[j].real(), 1e-12);
            CHECK(std::abs(res.mean.values[j] - exact.values[j]) < 3.0 * se);
        }
    }
    SUBCASE("too few paths rejected") {
        const Grid g(1, 32, 2.0 * kPi);
        CoefficientPath path = constant_path(1, 0.5, 1.0, 4);
        CHECK_THROWS_AS(feynman_kac_oracle(sin_field(g), Forcing{}, path, 50, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("mollify") {
    const Grid g(1, 128, 2.0 * kPi);
    SUBCASE("constants pass through") {
        GridField c(g);
        for (cplx& z : c.values) z = 1.7;
        const GridField out = mollify(c, 0.3);
        for (const cplx& z : out.values) CHECK(std::abs(z - 1.7) < 1e-12);
    }
    SUBCASE("eps sequence converges to the identity") {
        const GridField u = sin_field(g);
        double prev = 1e9;
        for (double eps : {0.2, 0.1, 0.05}) {
            const GridField ue = mollify(u, eps);
            GridField diff(g);
            for (std::size_t i = 0; i < g.size(); ++i)
                diff.values[i] = ue.values[i] - u.values[i];
            const double err = lp_norm(diff, 2.0);
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-2);
    }
    SUBCASE("Young's inequality: mollification does not increase L_p norms") {
        Rng rng(9, 0, "test");
        GridField u(g);
        for (cplx& z : u.values) z = cplx{rng.normal(), 0.0};
        for (double p : {2.0, 4.0})
            CHECK(lp_norm(mollify(u, 0.25), p) <= lp_norm(u, p) * (1.0 + 1e-12));
    }
    SUBCASE("eps out of range rejected") {
        CHECK_THROWS_AS(mollify(GridField(g), 0.0), std::invalid_argument);
        CHECK_THROWS_AS(mollify(GridField(g), g.L), std::invalid_argument);
    }
}
