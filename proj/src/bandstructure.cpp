#include "gapspectra/bandstructure.hpp"

#include <cmath>
#include <stdexcept>

namespace gapspectra {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

} // namespace

double phi(const TreeParams& tree, double xi) {
    return std::acos(std::cos(xi) / tree.R);
}

double psi(const TreeParams& tree, double mu) {
    double x = tree.R * std::cos(mu);
    if (std::abs(x) > 1.0) {
        if (std::abs(x) > 1.0 + 1e-12)
            throw std::domain_error("psi: mu outside [theta, pi - theta]");
        x = std::copysign(1.0, x);
    }
    return std::acos(x);
}

std::vector<BandGap> bands_and_gaps(const TreeParams& tree, int l_max) {
    if (l_max < 1) throw std::invalid_argument("bands_and_gaps: l_max must be >= 1");
    std::vector<BandGap> rows;
    rows.reserve(l_max);
    for (int l = 1; l <= l_max; ++l) {
        BandGap r;
        r.l = l;
        const double lo = M_PI * (l - 1) + tree.theta;
        const double hi = M_PI * l - tree.theta;
        const double gap_hi = M_PI * l + tree.theta;
        r.band_lo = lo * lo;
        r.band_hi = hi * hi;
        r.gap_lo = r.band_hi;
        r.gap_hi = gap_hi * gap_hi;
        r.mid = (M_PI * l) * (M_PI * l);
        rows.push_back(r);
    }
    return rows;
}

SpectralLocus locate(const TreeParams& tree, double lambda) {
    if (lambda < tree.theta * tree.theta) return {false, 0};
    const double k = std::sqrt(lambda);
    const int m = static_cast<int>(std::lround(k / M_PI));
    if (m >= 1 && std::abs(k - M_PI * m) < tree.theta) return {false, m};
    const int l = static_cast<int>(std::floor((k - tree.theta) / M_PI)) + 1;
    return {true, l};
}

double omega(const TreeParams& tree, double lambda) {
    if (lambda <= tree.theta * tree.theta) return 0.0;
    const SpectralLocus at = locate(tree, lambda);
    if (!at.in_band) return M_PI * at.index;
    const double k = std::sqrt(lambda);
    const int l = at.index;
    if (l % 2 == 1) return M_PI * (l - 1) + psi(tree, k - M_PI * (l - 1));
    return M_PI * l - psi(tree, M_PI * l - k);
}

double rho(const TreeParams& tree, double lambda) { return omega(tree, lambda) / M_PI; }

TransferRoots transfer_roots(const TreeParams& tree, double lambda) {
    if (!(lambda > 0)) throw std::domain_error("transfer_roots: lambda must be > 0");
    const double k = std::sqrt(lambda);
    const double rc = tree.R * std::cos(k);
    if (std::abs(rc) < 1.0 - 1e-14)
        throw std::domain_error("transfer_roots: band point, roots are complex");
    const double disc = std::max(rc * rc - 1.0, 0.0);
    TransferRoots r;
    r.q2 = rc + std::copysign(std::sqrt(disc), rc);
    r.q1 = 1.0 / r.q2;
    r.sigma = std::log(std::abs(r.q2));
    r.wronskian = std::sqrt(static_cast<double>(tree.b)) * (r.q2 - r.q1) * k * std::sin(k);
    return r;
}

double free_gap_eigenfunction(const TreeParams& tree, int l, double t) {
    if (l < 1) throw std::invalid_argument("free_gap_eigenfunction: l must be >= 1");
    if (!(t >= 0)) throw std::domain_error("free_gap_eigenfunction: t must be >= 0");
    const int n = static_cast<int>(std::floor(t)) + 1;
    const double c = std::sqrt(2.0 * (tree.b - 1));
    return c * std::exp(-0.5 * n * tree.beta) * std::sin(M_PI * l * t);
}

double free_solution(const TreeParams& tree, double k, int j, double t) {
    if (j != 1 && j != 2) throw std::invalid_argument("free_solution: j must be 1 or 2");
    if (!(t >= 0)) throw std::domain_error("free_solution: t must be >= 0");
    const TransferRoots r = transfer_roots(tree, k * k);
    const double qj = (j == 1) ? r.q1 : r.q2;
    const int n = static_cast<int>(std::floor(t)) + 1;
    const double rb = std::sqrt(static_cast<double>(tree.b));
    return (rb * std::sin(k * (n - t)) + qj * std::sin(k * (t - n + 1))) * ipow(qj, n - 1);
}

double free_solution_dirichlet(const TreeParams& tree, double k, double t) {
    if (!(t >= 0)) throw std::domain_error("free_solution_dirichlet: t must be >= 0");
    const TransferRoots r = transfer_roots(tree, k * k);
    const double dq = r.q2 - r.q1;
    if (std::abs(dq) < 1e-14)
        throw std::domain_error("free_solution_dirichlet: degenerate roots (R|cos k| = 1)");
    const int n = static_cast<int>(std::floor(t)) + 1;
    const double rb = std::sqrt(static_cast<double>(tree.b));
    const double a = (ipow(r.q2, n - 1) - ipow(r.q1, n - 1)) / dq;
    const double c = (ipow(r.q2, n) - ipow(r.q1, n)) / dq;
    return rb * a * std::sin(k * (n - t)) + c * std::sin(k * (t - n + 1));
}

} // namespace gapspectra
