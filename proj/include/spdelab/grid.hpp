#pragma once

// Periodic grid on [0,L)^d, fields sampled on it, and their discrete
// Fourier coefficients.
//
// Transform convention: the forward transform carries the h^d quadrature
// factor, so discrete and continuum transforms agree on band-limited
// functions and Parseval reads  sum_x |u|^2 h^d = L^{-d} sum_xi |u_hat|^2.
// This convention is fixed here and used everywhere else.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace spdelab {

using cplx = std::complex<double>;

struct Grid {
    int d = 1;       // dimension, 1..3
    int n = 64;      // points per axis, power of two, >= 8
    double L = 2.0 * 3.14159265358979323846;  // period per axis

    Grid() = default;
    Grid(int d_, int n_, double L_);

    double h() const { return L / n; }
    std::size_t size() const;

    // Physical frequency component for axis index k in [0,n):
    // xi = (2*pi/L) * k_signed with k_signed in [-n/2, n/2).
    double freq(int k) const;
    int signed_index(int k) const { return k < n / 2 ? k : k - n; }
    double nyquist() const { return (2.0 * 3.14159265358979323846 / L) * (n / 2); }

    // Decompose flat row-major index into per-axis indices (length d).
    void unflatten(std::size_t flat, int* idx) const;
    std::size_t flatten(const int* idx) const;

    // |xi|^2 at flat index.
    double freq_sq(std::size_t flat) const;

    bool operator==(const Grid& o) const { return d == o.d && n == o.n && L == o.L; }
};

// Complex samples of a (possibly l2-valued) function on the grid.
// Components are stored block-wise: component c occupies
// values[c*size() .. (c+1)*size()).
struct GridField {
    Grid grid;
    int arity = 1;
    std::vector<cplx> values;

    GridField() = default;
    GridField(const Grid& g, int arity_ = 1)
        : grid(g), arity(arity_), values(g.size() * arity_, cplx{}) {
        if (arity_ < 1) throw std::invalid_argument("GridField: arity must be >= 1");
    }

    cplx& at(std::size_t flat, int c = 0) { return values[static_cast<std::size_t>(c) * grid.size() + flat]; }
    const cplx& at(std::size_t flat, int c = 0) const { return values[static_cast<std::size_t>(c) * grid.size() + flat]; }

    bool finite() const;
};

// Discrete Fourier coefficients, same layout as GridField.
struct Spectrum {
    Grid grid;
    int arity = 1;
    std::vector<cplx> coeffs;

    Spectrum() = default;
    Spectrum(const Grid& g, int arity_ = 1)
        : grid(g), arity(arity_), coeffs(g.size() * arity_, cplx{}) {
        if (arity_ < 1) throw std::invalid_argument("Spectrum: arity must be >= 1");
    }

    cplx& at(std::size_t flat, int c = 0) { return coeffs[static_cast<std::size_t>(c) * grid.size() + flat]; }
    const cplx& at(std::size_t flat, int c = 0) const { return coeffs[static_cast<std::size_t>(c) * grid.size() + flat]; }

    bool finite() const;
};

/// Forward transform, u_hat(xi) = h^d sum_x e^{-i xi.x} u(x).
Spectrum forward_transform(const GridField& field);

/// Inverse transform, u(x) = L^{-d} sum_xi e^{+i xi.x} u_hat(xi).
GridField inverse_transform(const Spectrum& spec);

/// (1-Delta)^{s/2}: multiply each coefficient by (1+|xi|^2)^{s/2}.
GridField bessel_potential(const GridField& field, double s);
Spectrum bessel_potential(const Spectrum& spec, double s);

/// Spectral derivative D^alpha, multiplier (i xi)^alpha.
/// Odd-order axes zero the Nyquist mode so real fields stay real.
GridField derivative(const GridField& field, const std::vector<int>& multi_index);
Spectrum derivative(const Spectrum& spec, const std::vector<int>& multi_index);

/// L_p norm by torus-cell quadrature, (sum_x |v(x)|_{l2}^p h^d)^{1/p}.
/// For arity > 1 the pointwise l2 magnitude over components is taken first.
double lp_norm(const GridField& field, double p);

/// ||(1-Delta)^{gamma/2} u||_{L_p}.
double sobolev_norm(const GridField& field, double gamma, double p);
double sobolev_norm(const Spectrum& spec, double gamma, double p);

double lp_norm(const Spectrum& spec, double p);

}  // namespace spdelab
