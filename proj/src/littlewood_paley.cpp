#include "spdelab/littlewood_paley.hpp"

#include <cmath>

namespace spdelab {

namespace {

// Bump on the open annulus (1/2, 2); any positive profile works since the
// partition normalizes it.
double chi(double r) {
    if (!(r > 0.5) || !(r < 2.0)) return 0.0;
    const double t = 2.0 * (r - 1.25) / 3.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

// sum_{j in Z} chi(2^{-j} r); at most two consecutive shells are active.
double chi_sum(double r) {
    if (!(r > 0.0)) return 0.0;
    const int j0 = static_cast<int>(std::floor(std::log2(r)));
    double s = 0.0;
    for (int j = j0 - 2; j <= j0 + 2; ++j) s += chi(std::ldexp(r, -j));
    return s;
}

}  // namespace

double DyadicPartition::shell_multiplier(int j, double xi_abs) const {
    if (!(xi_abs > 0.0)) return 0.0;
    const double s = chi_sum(xi_abs);
    if (s == 0.0) return 0.0;
    return chi(std::ldexp(xi_abs, -j)) / s;
}

double DyadicPartition::low_multiplier(double xi_abs) const {
    if (!(xi_abs > 0.0)) return 1.0;  // DC passes through
    const int j0 = static_cast<int>(std::floor(std::log2(xi_abs)));
    double m = 0.0;
    for (int j = j0 - 2; j <= 0; ++j) m += shell_multiplier(j, xi_abs);
    return m;
}

double DyadicPartition::total(double xi_abs) const {
    if (!(xi_abs > 0.0)) return 1.0;
    const int j0 = static_cast<int>(std::floor(std::log2(xi_abs)));
    double m = 0.0;
    for (int j = j0 - 2; j <= j0 + 2; ++j) m += shell_multiplier(j, xi_abs);
    return m;
}

bool DyadicPartition::covered(double xi_abs) const {
    if (!(xi_abs > 0.0)) return true;
    const int j0 = static_cast<int>(std::floor(std::log2(xi_abs)));
    for (int j = j0 - 2; j <= j0 + 2; ++j) {
        if (shell_multiplier(j, xi_abs) > 0.0 && (j < j_min || j > j_max)) return false;
    }
    return true;
}

DyadicPartition build_partition(const Grid& grid) {
    DyadicPartition part;
    part.grid = grid;
    const double xi_min = 2.0 * 3.14159265358979323846 / grid.L;
    part.j_min = static_cast<int>(std::floor(std::log2(xi_min))) - 1;
    // Top shell fully representable: its annulus must fit under Nyquist.
    part.j_max = static_cast<int>(std::floor(std::log2(grid.nyquist()))) - 1;
    if (part.j_max - part.j_min < 2)
        throw std::invalid_argument("build_partition: grid too coarse for three dyadic shells");
    return part;
}

Spectrum block(const Spectrum& spec, int j, const DyadicPartition& part) {
    if (j < part.j_min || j > part.j_max)
        throw std::invalid_argument("block: shell index outside partition range");
    Spectrum out = spec;
    const Grid& g = spec.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double m = part.shell_multiplier(j, std::sqrt(g.freq_sq(i)));
        for (int c = 0; c < spec.arity; ++c) out.at(i, c) *= m;
    }
    return out;
}

GridField block(const GridField& field, int j, const DyadicPartition& part) {
    return inverse_transform(block(forward_transform(field), j, part));
}

Spectrum low_block(const Spectrum& spec, const DyadicPartition& part) {
    Spectrum out = spec;
    const Grid& g = spec.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double m = part.low_multiplier(std::sqrt(g.freq_sq(i)));
        for (int c = 0; c < spec.arity; ++c) out.at(i, c) *= m;
    }
    return out;
}

GridField low_block(const GridField& field, const DyadicPartition& part) {
    return inverse_transform(low_block(forward_transform(field), part));
}

double besov_norm(const Spectrum& spec, double gamma, double p, const DyadicPartition& part) {
    if (!(p >= 1.0)) throw std::invalid_argument("besov_norm: p must be >= 1");
    double out = lp_norm(low_block(spec, part), p);
    double sum = 0.0;
    for (int j = 1; j <= part.j_max; ++j) {
        const double nj = lp_norm(block(spec, j, part), p);
        sum += std::pow(2.0, gamma * p * j) * std::pow(nj, p);
    }
    return out + std::pow(sum, 1.0 / p);
}

double homogeneous_besov_norm(const Spectrum& spec, double gamma, double p,
                              const DyadicPartition& part) {
    if (!(p >= 1.0)) throw std::invalid_argument("homogeneous_besov_norm: p must be >= 1");
    double sum = 0.0;
    for (int j = part.j_min; j <= part.j_max; ++j) {
        const double nj = lp_norm(block(spec, j, part), p);
        sum += std::pow(2.0, gamma * p * j) * std::pow(nj, p);
    }
    return std::pow(sum, 1.0 / p);
}

double besov_norm(const GridField& field, double gamma, double p, const DyadicPartition& part) {
    return besov_norm(forward_transform(field), gamma, p, part);
}

double homogeneous_besov_norm(const GridField& field, double gamma, double p,
                              const DyadicPartition& part) {
    return homogeneous_besov_norm(forward_transform(field), gamma, p, part);
}

}  // namespace spdelab
