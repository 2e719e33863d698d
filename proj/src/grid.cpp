#include "spdelab/grid.hpp"

#include <cmath>
#include <numbers>

namespace spdelab {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place radix-2 Cooley-Tukey, sign = -1 forward / +1 inverse, no scaling.
void fft_line(cplx* a, int n, int sign) {
    // bit reversal
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * kPi / len;
        for (int i = 0; i < n; i += len) {
            for (int k = 0; k < len / 2; ++k) {
                const cplx w = std::polar(1.0, ang * k);
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

// Transform one component block along every axis.
void fft_nd(cplx* data, const Grid& g, int sign) {
    const std::size_t total = g.size();
    std::vector<cplx> line(g.n);
    for (int axis = 0; axis < g.d; ++axis) {
        std::size_t stride = 1;
        for (int a = axis + 1; a < g.d; ++a) stride *= g.n;
        const std::size_t block = stride * g.n;
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                cplx* p = data + base + off;
                for (int k = 0; k < g.n; ++k) line[k] = p[k * stride];
                fft_line(line.data(), g.n, sign);
                for (int k = 0; k < g.n; ++k) p[k * stride] = line[k];
            }
        }
    }
}

bool all_finite(const std::vector<cplx>& v) {
    for (const cplx& z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace

Grid::Grid(int d_, int n_, double L_) : d(d_), n(n_), L(L_) {
    if (d < 1 || d > 3) throw std::invalid_argument("Grid: d must be 1..3");
    if (n < 8 || !is_pow2(n)) throw std::invalid_argument("Grid: n must be a power of two >= 8");
    if (!(L > 0.0)) throw std::invalid_argument("Grid: L must be positive");
    if (size() > (std::size_t{1} << 24)) throw std::invalid_argument("Grid: total point budget exceeded");
}

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
    return s;
}

double Grid::freq(int k) const { return (2.0 * kPi / L) * signed_index(k); }

void Grid::unflatten(std::size_t flat, int* idx) const {
    for (int a = d - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % n);
        flat /= n;
    }
}

std::size_t Grid::flatten(const int* idx) const {
    std::size_t f = 0;
    for (int a = 0; a < d; ++a) f = f * n + static_cast<std::size_t>(idx[a]);
    return f;
}

double Grid::freq_sq(std::size_t flat) const {
    int idx[3];
    unflatten(flat, idx);
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
        const double xi = freq(idx[a]);
        s += xi * xi;
    }
    return s;
}

bool GridField::finite() const { return all_finite(values); }
bool Spectrum::finite() const { return all_finite(coeffs); }

Spectrum forward_transform(const GridField& field) {
    if (!field.finite()) throw std::invalid_argument("forward_transform: non-finite input field");
    Spectrum out(field.grid, field.arity);
    out.coeffs = field.values;
    const double scale = std::pow(field.grid.h(), field.grid.d);
    const std::size_t block = field.grid.size();
    for (int c = 0; c < field.arity; ++c) {
        fft_nd(out.coeffs.data() + c * block, field.grid, -1);
    }
    for (cplx& z : out.coeffs) z *= scale;
    return out;
}

GridField inverse_transform(const Spectrum& spec) {
    if (!spec.finite()) throw std::invalid_argument("inverse_transform: non-finite input spectrum");
    GridField out(spec.grid, spec.arity);
    out.values = spec.coeffs;
    const double scale = 1.0 / std::pow(spec.grid.L, spec.grid.d);
    const std::size_t block = spec.grid.size();
    for (int c = 0; c < spec.arity; ++c) {
        fft_nd(out.values.data() + c * block, spec.grid, +1);
    }
    for (cplx& z : out.values) z *= scale;
    return out;
}

Spectrum bessel_potential(const Spectrum& spec, double s) {
    Spectrum out = spec;
    const std::size_t block = spec.grid.size();
    for (std::size_t i = 0; i < block; ++i) {
        const double m = std::pow(1.0 + spec.grid.freq_sq(i), 0.5 * s);
        for (int c = 0; c < spec.arity; ++c) out.at(i, c) *= m;
    }
    return out;
}

GridField bessel_potential(const GridField& field, double s) {
    return inverse_transform(bessel_potential(forward_transform(field), s));
}

Spectrum derivative(const Spectrum& spec, const std::vector<int>& multi_index) {
    if (static_cast<int>(multi_index.size()) != spec.grid.d)
        throw std::invalid_argument("derivative: multi-index size must equal grid dimension");
    int order = 0;
    for (int a : multi_index) {
        if (a < 0) throw std::invalid_argument("derivative: negative order");
        order += a;
    }
    if (order > 4) throw std::invalid_argument("derivative: total order must be <= 4");
    Spectrum out = spec;
    const Grid& g = spec.grid;
    int idx[3];
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.unflatten(i, idx);
        cplx m{1.0, 0.0};
        for (int a = 0; a < g.d; ++a) {
            if (multi_index[a] == 0) continue;
            // Nyquist has no well-defined sign; zero it for odd orders.
            if (idx[a] == g.n / 2 && (multi_index[a] % 2) == 1) {
                m = 0.0;
                break;
            }
            const cplx ixi{0.0, g.freq(idx[a])};
            for (int r = 0; r < multi_index[a]; ++r) m *= ixi;
        }
        for (int c = 0; c < spec.arity; ++c) out.at(i, c) *= m;
    }
    return out;
}

GridField derivative(const GridField& field, const std::vector<int>& multi_index) {
    return inverse_transform(derivative(forward_transform(field), multi_index));
}

double lp_norm(const GridField& field, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (!field.finite()) throw std::invalid_argument("lp_norm: non-finite field");
    const std::size_t block = field.grid.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < block; ++i) {
        double mag2 = 0.0;
        for (int c = 0; c < field.arity; ++c) mag2 += std::norm(field.at(i, c));
        acc += std::pow(mag2, 0.5 * p);
    }
    const double hd = std::pow(field.grid.h(), field.grid.d);
    return std::pow(acc * hd, 1.0 / p);
}

double sobolev_norm(const GridField& field, double gamma, double p) {
    if (gamma == 0.0) return lp_norm(field, p);
    return lp_norm(bessel_potential(field, gamma), p);
}

double sobolev_norm(const Spectrum& spec, double gamma, double p) {
    return lp_norm(inverse_transform(bessel_potential(spec, gamma)), p);
}

double lp_norm(const Spectrum& spec, double p) { return lp_norm(inverse_transform(spec), p); }

}  // namespace spdelab
