#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "spdelab/coefficients.hpp"
#include "spdelab/rng.hpp"

using namespace spdelab;

namespace {

std::vector<double> uniform_times(double T, int M) {
    std::vector<double> t(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) t[m] = T * m / M;
    return t;
}

}  // namespace

TEST_CASE("family name round trip") {
    for (FamilyKind k : {FamilyKind::ConstantElliptic, FamilyKind::DegenerateWindow,
                         FamilyKind::VanishingEigenvalue, FamilyKind::UnboundedIntegrable,
                         FamilyKind::FullyDegenerate, FamilyKind::RandomPsd})
        CHECK(family_from_name(family_name(k)) == k);
    CHECK_THROWS_AS(family_from_name("no_such_family"), std::invalid_argument);
}

TEST_CASE("fully degenerate family is identically zero") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::FullyDegenerate;
    const CoefficientPath path = sample_path(fam, 2, 3, uniform_times(1.0, 8), 1);
    for (std::size_t m = 0; m < path.intervals(); ++m) {
        CHECK(path.a[m].max_abs() == 0.0);
        for (double s : path.sigma[m]) CHECK(s == 0.0);
        CHECK(delta_weight(path, m) == 0.0);
    }
    const AssumptionReport rep = check_assumptions(path);
    CHECK(rep.pass());
    CHECK(rep.a_integral == 0.0);
    CHECK(rep.sigma_sq_integral == 0.0);
}

TEST_CASE("constant elliptic kappa=1 gives a = I/2 and delta = 1/2") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::ConstantElliptic;
    fam.kappa = 1.0;
    const CoefficientPath path = sample_path(fam, 2, 1, uniform_times(1.0, 4), 3);
    for (std::size_t m = 0; m < path.intervals(); ++m) {
        CHECK(path.a[m](0, 0) == doctest::Approx(0.5));
        CHECK(path.a[m](1, 1) == doctest::Approx(0.5));
        CHECK(path.a[m](0, 1) == 0.0);
        CHECK(delta_weight(path, m) == doctest::Approx(0.5));
    }
}

TEST_CASE("random psd paths satisfy the PSD assumption, 1000 draws") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::RandomPsd;
    fam.sigma_scale = 0.3;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const CoefficientPath path = sample_path(fam, 2, 4, uniform_times(1.0, 10), seed);
        for (std::size_t m = 0; m < path.intervals(); ++m)
            CHECK(smallest_eigenvalue(alpha_matrix(path, m)) >= -1e-14);
        CHECK(check_assumptions(path).pass());
    }
}

TEST_CASE("alpha matrix") {
    SUBCASE("sigma = 0 leaves a unchanged") {
        CoefficientFamily fam;
        fam.kind = FamilyKind::ConstantElliptic;
        fam.kappa = 2.0;
        const CoefficientPath path = sample_path(fam, 3, 1, uniform_times(1.0, 2), 0);
        const SymMat al = alpha_matrix(path, 0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(al(i, j) == doctest::Approx(path.a[0](i, j)));
    }
    SUBCASE("exact cancellation in d = 1") {
        CoefficientPath path;
        path.times = uniform_times(1.0, 1);
        path.d = 1;
        path.K = 2;
        path.a = {SymMat::identity(1, 0.5)};
        path.sigma = {{1.0, 0.0}};
        CHECK(alpha_matrix(path, 0)(0, 0) == doctest::Approx(0.0));
        CHECK(delta_weight(path, 0) == 0.0);
    }
    SUBCASE("matches the brute-force sigma sigma^T sum") {
        CoefficientFamily fam;
        fam.kind = FamilyKind::RandomPsd;
        fam.sigma_scale = 0.5;
        const CoefficientPath path = sample_path(fam, 2, 6, uniform_times(1.0, 3), 11);
        for (std::size_t m = 0; m < path.intervals(); ++m) {
            const SymMat al = alpha_matrix(path, m);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double dot = 0.0;
                    for (int k = 0; k < path.K; ++k)
                        dot += path.sigma[m][i * path.K + k] * path.sigma[m][j * path.K + k];
                    CHECK(std::abs(al(i, j) - (path.a[m](i, j) - 0.5 * dot)) < 1e-14);
                }
        }
    }
}

TEST_CASE("delta is a true Rayleigh lower bound") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::RandomPsd;
    fam.sigma_scale = 0.2;
    const CoefficientPath path = sample_path(fam, 3, 4, uniform_times(1.0, 5), 21);
    Rng rng(5, 0, "test");
    for (std::size_t m = 0; m < path.intervals(); ++m) {
        const SymMat al = alpha_matrix(path, m);
        const double delta = delta_weight(path, m);
        for (int trial = 0; trial < 1000; ++trial) {
            double xi[3], norm2 = 0.0;
            for (int i = 0; i < 3; ++i) {
                xi[i] = rng.normal();
                norm2 += xi[i] * xi[i];
            }
            CHECK(al.quad(xi) >= delta * norm2 - 1e-10);
        }
    }
}

TEST_CASE("sigma sup") {
    CoefficientPath path;
    path.times = uniform_times(1.0, 1);
    path.d = 2;
    path.K = 3;
    path.a = {SymMat::identity(2, 1.0)};
    path.sigma = {{3.0, 4.0, 0.0, 1.0, 0.0, 0.0}};  // rows (3,4,0), (1,0,0)
    CHECK(sigma_sup(path, 0) == doctest::Approx(5.0));

    path.sigma = {{0.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
    CHECK(sigma_sup(path, 0) == 0.0);
}

TEST_CASE("weight conventions") {
    CHECK(weight_value(4.0, 0.0, WeightKind::DeltaOneMinusP, 3.0) == doctest::Approx(1.0 / 16.0));
    CHECK(weight_value(0.0, 0.0, WeightKind::DeltaOneMinusP, 3.0) ==
          std::numeric_limits<double>::infinity());
    CHECK(weight_value(0.0, 0.0, WeightKind::DeltaOneMinusHalfP, 2.0) == 1.0);  // p=2 convention
    CHECK(weight_value(0.5, 0.0, WeightKind::DeltaOneMinusHalfP, 2.0) == 1.0);
    CHECK(weight_value(0.0, 2.0, WeightKind::SigmaP, 3.0) == doctest::Approx(8.0));
    CHECK_THROWS_AS(weight_value(1.0, 0.0, WeightKind::Delta, 1.5), std::invalid_argument);

    // 0 * inf := 0
    CHECK(weighted_term(0.0, std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(weighted_term(2.0, 0.5) == doctest::Approx(1.0));
    CHECK(std::isinf(weighted_term(1.0, std::numeric_limits<double>::infinity())));
}

TEST_CASE("weight via path accessor matches weight_value") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::RandomPsd;
    fam.sigma_scale = 0.4;
    const CoefficientPath path = sample_path(fam, 2, 3, uniform_times(1.0, 6), 9);
    for (std::size_t m = 0; m < path.intervals(); ++m)
        for (WeightKind k : {WeightKind::Delta, WeightKind::DeltaOneMinusP,
                             WeightKind::DeltaOneMinusHalfP, WeightKind::SigmaPDeltaOneMinusP})
            CHECK(weight(path, k, 4.0, m) ==
                  doctest::Approx(weight_value(delta_weight(path, m), sigma_sup(path, m), k, 4.0)));
}

TEST_CASE("unbounded integrable family: integral close to 2c sqrt(T), sup unbounded") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::UnboundedIntegrable;
    fam.theta = 0.5;
    fam.scale = 1.0;
    const int M = 4096;
    const CoefficientPath path = sample_path(fam, 1, 1, uniform_times(1.0, M), 2);
    const AssumptionReport rep = check_assumptions(path);
    CHECK(rep.pass());
    // int_0^1 t^{-1/2} dt = 2; midpoint-style quadrature error vanishes as M grows
    CHECK(rep.a_integral == doctest::Approx(2.0).epsilon(0.05));
    // the first interval exceeds any moderate uniform bound
    CHECK(path.a[0](0, 0) > 10.0);
}

TEST_CASE("constructed PSD violation fails the checks") {
    CoefficientPath path;
    path.times = uniform_times(1.0, 1);
    path.d = 2;
    path.K = 1;
    SymMat bad(2);
    bad(0, 0) = 1.0;
    bad(1, 1) = -0.1;
    path.a = {bad};
    path.sigma = {{0.0, 0.0}};
    const AssumptionReport rep = check_assumptions(path);
    CHECK_FALSE(rep.psd_ok);
    CHECK_FALSE(rep.pass());
    CHECK(rep.min_alpha_eigenvalue == doctest::Approx(-0.1));
}

TEST_CASE("alpha invariant under symmetrization of a") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::RandomPsd;
    const CoefficientPath path = sample_path(fam, 2, 2, uniform_times(1.0, 4), 31);
    Rng rng(6, 0, "test");
    for (std::size_t m = 0; m < path.intervals(); ++m) {
        const SymMat al = alpha_matrix(path, m);
        CoefficientPath twisted = path;
        twisted.a[m](0, 1) += 0.3;  // asymmetric perturbation, symmetrization removes half
        twisted.a[m](1, 0) -= 0.3;
        const SymMat al2 = alpha_matrix(twisted, m);
        for (int trial = 0; trial < 100; ++trial) {
            double xi[2] = {rng.normal(), rng.normal()};
            CHECK(std::abs(al.quad(xi) - al2.quad(xi)) < 1e-12);
        }
    }
}

TEST_CASE("degenerate window family") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::DegenerateWindow;
    fam.kappa = 1.0;
    fam.window_fraction = 0.5;
    const CoefficientPath path = sample_path(fam, 1, 1, uniform_times(1.0, 8), 4);
    for (std::size_t m = 0; m < path.intervals(); ++m) {
        const double mid = 0.5 * (path.times[m] + path.times[m + 1]);
        if (mid < 0.5)
            CHECK(delta_weight(path, m) > 0.0);
        else
            CHECK(delta_weight(path, m) == 0.0);
    }
    CHECK(check_assumptions(path).pass());
}

TEST_CASE("vanishing eigenvalue family is rank-deficient on its sublattice") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::VanishingEigenvalue;
    fam.kappa = 1.0;
    fam.degenerate_rank = 1;
    fam.degenerate_stride = 2;
    const CoefficientPath path = sample_path(fam, 2, 1, uniform_times(1.0, 8), 5);
    bool saw_degenerate = false, saw_elliptic = false;
    for (std::size_t m = 0; m < path.intervals(); ++m) {
        if (delta_weight(path, m) == 0.0)
            saw_degenerate = true;
        else
            saw_elliptic = true;
    }
    CHECK(saw_degenerate);
    CHECK(saw_elliptic);
    CHECK(check_assumptions(path).pass());
}

TEST_CASE("sampling is deterministic given the seed") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::RandomPsd;
    fam.sigma_scale = 0.7;
    const CoefficientPath a = sample_path(fam, 3, 5, uniform_times(2.0, 16), 42);
    const CoefficientPath b = sample_path(fam, 3, 5, uniform_times(2.0, 16), 42);
    for (std::size_t m = 0; m < a.intervals(); ++m) {
        CHECK((a.a[m] - b.a[m]).max_abs() == 0.0);
        CHECK(a.sigma[m] == b.sigma[m]);
    }
}

TEST_CASE("invalid family parameters rejected") {
    CoefficientFamily fam;
    fam.kind = FamilyKind::UnboundedIntegrable;
    fam.theta = 1.5;  // not integrable
    CHECK_THROWS_AS(sample_path(fam, 1, 1, uniform_times(1.0, 4), 0), std::invalid_argument);

    CoefficientFamily fam2;
    fam2.kind = FamilyKind::ConstantElliptic;
    fam2.kappa = -1.0;
    CHECK_THROWS_AS(sample_path(fam2, 1, 1, uniform_times(1.0, 4), 0), std::invalid_argument);
}
