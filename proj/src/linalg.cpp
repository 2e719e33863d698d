#include "spdelab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace spdelab {

SymMat SymMat::identity(int d_, double scale) {
    SymMat a(d_);
    for (int i = 0; i < d_; ++i) a(i, i) = scale;
    return a;
}

bool SymMat::symmetric(double tol) const {
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol * (1.0 + max_abs())) return false;
    return true;
}

SymMat SymMat::symmetrized() const {
    SymMat a(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return a;
}

SymMat SymMat::operator+(const SymMat& o) const {
    SymMat a(d);
    for (int i = 0; i < d * d; ++i) a.m[i] = m[i] + o.m[i];
    return a;
}

SymMat SymMat::operator-(const SymMat& o) const {
    SymMat a(d);
    for (int i = 0; i < d * d; ++i) a.m[i] = m[i] - o.m[i];
    return a;
}

SymMat SymMat::scaled(double s) const {
    SymMat a(d);
    for (int i = 0; i < d * d; ++i) a.m[i] = m[i] * s;
    return a;
}

double SymMat::quad(const double* xi) const {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) s += (*this)(i, j) * xi[i] * xi[j];
    return s;
}

double SymMat::max_abs() const {
    double v = 0.0;
    for (int i = 0; i < d * d; ++i) v = std::max(v, std::abs(m[i]));
    return v;
}

SymEig sym_eig(const SymMat& a_in) {
    const int d = a_in.d;
    SymMat a = a_in.symmetrized();
    SymEig out;
    // identity eigenvectors
    for (int i = 0; i < d; ++i) out.vectors[static_cast<std::size_t>(i) * d + i] = 1.0;
    auto V = [&](int i, int j) -> double& { return out.vectors[static_cast<std::size_t>(i) * d + j]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30 * (1.0 + a.max_abs() * a.max_abs())) break;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // rotate rows/cols p,q
                SymMat b = a;
                for (int k = 0; k < d; ++k) {
                    b(p, k) = c * a(p, k) - s * a(q, k);
                    b(q, k) = s * a(p, k) + c * a(q, k);
                }
                SymMat bb = b;
                for (int k = 0; k < d; ++k) {
                    bb(k, p) = c * b(k, p) - s * b(k, q);
                    bb(k, q) = s * b(k, p) + c * b(k, q);
                }
                a = bb;
                for (int k = 0; k < d; ++k) {
                    const double vp = V(k, p), vq = V(k, q);
                    V(k, p) = c * vp - s * vq;
                    V(k, q) = s * vp + c * vq;
                }
            }
        }
    }
    for (int i = 0; i < d; ++i) out.values[i] = a(i, i);
    // sort ascending, permuting columns with values
    for (int i = 0; i < d; ++i) {
        int lo = i;
        for (int j = i + 1; j < d; ++j)
            if (out.values[j] < out.values[lo]) lo = j;
        if (lo != i) {
            std::swap(out.values[i], out.values[lo]);
            for (int k = 0; k < d; ++k) std::swap(V(k, i), V(k, lo));
        }
    }
    return out;
}

double smallest_eigenvalue(const SymMat& a, double sym_tol) {
    if (!a.symmetric(sym_tol))
        throw std::invalid_argument("smallest_eigenvalue: input matrix is not symmetric");
    return sym_eig(a).values[0];
}

SymMat clamp_psd(const SymMat& a, double tol) {
    SymEig e = sym_eig(a);
    bool clean = true;
    for (int i = 0; i < a.d; ++i)
        if (e.values[i] < 0.0) clean = false;
    if (clean) return a.symmetrized();
    SymMat out(a.d);
    auto V = [&](int i, int j) { return e.vectors[static_cast<std::size_t>(i) * a.d + j]; };
    for (int i = 0; i < a.d; ++i) {
        for (int j = 0; j < a.d; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.d; ++k) s += V(i, k) * std::max(e.values[k], 0.0) * V(j, k);
            out(i, j) = s;
        }
    }
    (void)tol;
    return out;
}

SymMat sqrt_psd(const SymMat& a, double tol) {
    SymEig e = sym_eig(a);
    const double scale = 1.0 + a.max_abs();
    for (int i = 0; i < a.d; ++i) {
        if (e.values[i] < -tol * scale)
            throw std::invalid_argument("sqrt_psd: matrix has a negative eigenvalue beyond tolerance");
    }
    SymMat out(a.d);
    auto V = [&](int i, int j) { return e.vectors[static_cast<std::size_t>(i) * a.d + j]; };
    for (int i = 0; i < a.d; ++i) {
        for (int j = 0; j < a.d; ++j) {
            double s = 0.0;
            for (int k = 0; k < a.d; ++k)
                s += V(i, k) * std::sqrt(std::max(e.values[k], 0.0)) * V(j, k);
            out(i, j) = s;
        }
    }
    return out;
}

}  // namespace spdelab
