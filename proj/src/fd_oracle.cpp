#include "gapspectra/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapspectra {

namespace {

double weight_at(int b, double t) {
    // b_Gamma(t) = b^k for k-1 <= t < k
    const int k = static_cast<int>(std::floor(t)) + 1;
    return std::pow(static_cast<double>(b), k);
}

} // namespace

DiscretizedForm assemble(const TreeParams& tree, Sign sign, const Potential& q, double g,
                         const Interval& delta, double h) {
    if (!(h > 0)) throw std::invalid_argument("assemble: h must be > 0");
    if (!delta.bounded()) throw std::invalid_argument("assemble: interval must be bounded");
    if (!(delta.r1 >= 0)) throw std::invalid_argument("assemble: r1 must be >= 0");
    const double m_real = 1.0 / h;
    const long long m = std::llround(m_real);
    if (std::abs(m_real - m) > 1e-9)
        throw std::invalid_argument("assemble: h must divide unit intervals");
    if (m < 8) throw std::invalid_argument("assemble: mesh too coarse, need >= 8 nodes per unit");
    if (delta.r2 * tree.beta > 650.0)
        throw std::invalid_argument("assemble: interval too long, weight b^k overflows doubles");

    // nodes: r1, grid multiples of h strictly inside, r2
    std::vector<double> nodes;
    nodes.push_back(delta.r1);
    long long i0 = static_cast<long long>(std::floor(delta.r1 / h)) + 1;
    for (long long i = i0;; ++i) {
        const double x = i * h;
        if (x >= delta.r2 - 1e-12 * (1 + std::abs(delta.r2))) break;
        if (x > delta.r1 + 1e-12 * (1 + std::abs(delta.r1))) nodes.push_back(x);
    }
    nodes.push_back(delta.r2);
    const std::size_t nn = nodes.size();
    if (nn < 3) throw std::invalid_argument("assemble: interval shorter than the mesh width");

    std::vector<double> kd(nn, 0.0), ko(nn - 1, 0.0), md(nn, 0.0), mo(nn - 1, 0.0);
    double wlen = 0.0;
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    const double sg = to_int(sign) * g;

    for (std::size_t e = 0; e + 1 < nn; ++e) {
        const double x0 = nodes[e];
        const double len = nodes[e + 1] - x0;
        const double w = weight_at(tree.b, x0 + 0.5 * len);
        wlen += w * len;
        const double ks = w / len;
        kd[e] += ks;
        kd[e + 1] += ks;
        ko[e] -= ks;
        md[e] += w * len / 3.0;
        md[e + 1] += w * len / 3.0;
        mo[e] += w * len / 6.0;
        if (sg != 0.0) {
            for (double r : gp) {
                const double xg = x0 + r * len;
                const double v = sg * q(xg);
                const double c = w * len * 0.5 * v;
                kd[e] += c * (1 - r) * (1 - r);
                kd[e + 1] += c * r * r;
                ko[e] += c * (1 - r) * r;
            }
        }
    }

    DiscretizedForm form;
    form.b = tree.b;
    form.r1 = delta.r1;
    form.r2 = delta.r2;
    form.h = h;
    form.weighted_length = wlen;
    // Dirichlet: drop the first and last node
    form.kd.assign(kd.begin() + 1, kd.end() - 1);
    form.md.assign(md.begin() + 1, md.end() - 1);
    form.ko.assign(ko.begin() + 1, ko.end() - 1);
    form.mo.assign(mo.begin() + 1, mo.end() - 1);
    return form;
}

long long inertia_count(const DiscretizedForm& form, double lambda) {
    const std::size_t n = form.dim();
    if (n == 0) throw std::logic_error("inertia_count: empty form");
    // The weight b^k grades the matrix over many orders of magnitude, so the
    // degenerate-pivot guard compares against the local row scale.
    auto row_scale = [&](std::size_t i) {
        double s = std::abs(form.kd[i]) + std::abs(lambda) * form.md[i];
        if (i > 0) s += std::abs(form.ko[i - 1] - lambda * form.mo[i - 1]);
        if (i + 1 < n) s += std::abs(form.ko[i] - lambda * form.mo[i]);
        return s;
    };

    long long neg = 0;
    double d = form.kd[0] - lambda * form.md[0];
    if (std::abs(d) < 1e-12 * row_scale(0))
        throw std::runtime_error("inertia_count: lambda too close to a discrete eigenvalue");
    if (d < 0) ++neg;
    for (std::size_t i = 1; i < n; ++i) {
        const double c = form.ko[i - 1] - lambda * form.mo[i - 1];
        d = (form.kd[i] - lambda * form.md[i]) - c * c / d;
        if (std::abs(d) < 1e-12 * row_scale(i))
            throw std::runtime_error("inertia_count: lambda too close to a discrete eigenvalue");
        if (d < 0) ++neg;
    }
    return neg;
}

std::vector<double> dense_eigs(const DiscretizedForm& form, std::size_t n_lowest) {
    const std::size_t n = form.dim();
    if (n > 20000) throw std::invalid_argument("dense_eigs: dimension cap (20000) exceeded");
    n_lowest = std::min(n_lowest, n);

    auto inertia_robust = [&](double lam) {
        for (int k = 0; k < 8; ++k) {
            try {
                return inertia_count(form, lam);
            } catch (const std::runtime_error&) {
                lam += 3e-13 * (1.0 + std::abs(lam));
            }
        }
        return inertia_count(form, lam);
    };

    // pencil eigenvalue bounds: Rayleigh quotients of (K, M) with M SPD
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double moff = (i > 0 ? std::abs(form.mo[i - 1]) : 0.0) +
                            (i + 1 < n ? std::abs(form.mo[i]) : 0.0);
        const double koff = (i > 0 ? std::abs(form.ko[i - 1]) : 0.0) +
                            (i + 1 < n ? std::abs(form.ko[i]) : 0.0);
        const double mlo = form.md[i] - moff; // > 0 by row dominance of the P1 mass
        hi = std::max(hi, (form.kd[i] + koff) / mlo);
        lo = std::min(lo, (form.kd[i] - koff) / mlo);
    }
    lo -= 1.0;
    hi += 1.0;
    while (inertia_robust(lo) > 0) lo = 2 * lo - std::abs(hi);

    std::vector<double> out;
    out.reserve(n_lowest);
    double left = lo;
    for (std::size_t j = 1; j <= n_lowest; ++j) {
        double a = left, b = hi;
        for (int it = 0; it < 80 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
            const double mid = 0.5 * (a + b);
            if (inertia_robust(mid) >= static_cast<long long>(j))
                b = mid;
            else
                a = mid;
        }
        out.push_back(0.5 * (a + b));
        left = a; // eigenvalues are returned in ascending order
    }
    return out;
}

} // namespace gapspectra
