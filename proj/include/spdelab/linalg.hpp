#pragma once

// Small dense symmetric matrices (d <= 3) with the few decompositions the
// solvers need: smallest eigenvalue, PSD projection, symmetric square root.

#include <array>
#include <stdexcept>

namespace spdelab {

struct SymMat {
    int d = 1;
    std::array<double, 9> m{};  // row-major d x d

    SymMat() = default;
    explicit SymMat(int d_) : d(d_) {
        if (d_ < 1 || d_ > 3) throw std::invalid_argument("SymMat: d must be 1..3");
    }

    static SymMat identity(int d_, double scale = 1.0);
    static SymMat zero(int d_) { return SymMat(d_); }

    double& operator()(int i, int j) { return m[static_cast<std::size_t>(i) * d + j]; }
    double operator()(int i, int j) const { return m[static_cast<std::size_t>(i) * d + j]; }

    bool symmetric(double tol = 1e-12) const;
    SymMat symmetrized() const;

    SymMat operator+(const SymMat& o) const;
    SymMat operator-(const SymMat& o) const;
    SymMat scaled(double s) const;

    // xi^T A xi
    double quad(const double* xi) const;

    // max_ij |A_ij|
    double max_abs() const;
};

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// eigvals ascending; eigvecs columns in the same order.
struct SymEig {
    std::array<double, 3> values{};
    std::array<double, 9> vectors{};  // row-major, column k = eigenvector k
};

SymEig sym_eig(const SymMat& a);

/// Smallest eigenvalue; rejects asymmetric input.
double smallest_eigenvalue(const SymMat& a, double sym_tol = 1e-10);

/// Eigenvalue flooring at zero, for alpha matrices with rounding noise.
SymMat clamp_psd(const SymMat& a, double tol = 1e-12);

/// Symmetric PSD square root: returns S with S*S = A to roundoff.
/// Eigenvalues below -tol are rejected; small negatives are floored.
SymMat sqrt_psd(const SymMat& a, double tol = 1e-10);

}  // namespace spdelab
