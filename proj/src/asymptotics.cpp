#include "gapspectra/asymptotics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gapspectra {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rho_at(const TreeParams& tree, double x) {
    // beyond ~1e12 the band structure contributes O(1) against omega ~ sqrt(x)
    if (x > 1e12) return std::sqrt(x) / M_PI;
    return rho(tree, x);
}

// Band edges e with lo < e < hi, i.e. the kink set of rho in (lo, hi).
std::vector<double> band_edges_between(const TreeParams& tree, double lo, double hi) {
    std::vector<double> edges;
    auto push = [&](double e) {
        if (e > lo && e < hi) edges.push_back(e);
    };
    push(tree.theta * tree.theta);
    for (int m = 1;; ++m) {
        const double ea = M_PI * m - tree.theta;
        if (ea * ea > hi) break;
        push(ea * ea);
        const double eb = M_PI * m + tree.theta;
        push(eb * eb);
        if (m > 100000) break;
    }
    return edges;
}

// u-values inside (a, b) where lambda - s*u^{-2 gamma} crosses a band edge.
std::vector<double> integrand_breakpoints(const TreeParams& tree, int s, double gamma,
                                          double lambda, double a, double b) {
    std::vector<double> us;
    const double wa = std::pow(std::max(a, 1e-300), -2.0 * gamma); // largest w on the range
    const double wb = std::pow(b, -2.0 * gamma);
    double arg_lo, arg_hi;
    if (s > 0) {
        arg_lo = lambda - wa;
        arg_hi = lambda - wb;
    } else {
        arg_lo = lambda + wb;
        arg_hi = std::min(lambda + wa, 1e12);
    }
    for (double e : band_edges_between(tree, arg_lo, arg_hi)) {
        const double w = s > 0 ? lambda - e : e - lambda;
        if (w <= 0) continue;
        const double u = std::pow(w, -1.0 / (2.0 * gamma));
        if (u > a && u < b) us.push_back(u);
    }
    std::sort(us.begin(), us.end());
    return us;
}

double piecewise_integrate(const std::function<double(double)>& f, double a, double b,
                           std::vector<double> breaks, double tol) {
    breaks.push_back(b);
    boost::math::quadrature::tanh_sinh<double> integ(12);
    double total = 0.0;
    double lo = a;
    for (double hi : breaks) {
        if (hi <= lo) continue;
        total += integ.integrate(f, lo, hi, tol);
        lo = hi;
    }
    return total;
}

// Upper limit beyond which the F integrand vanishes identically (support), or
// +inf when lambda sits at a gap edge / in a band.
double support_limit(const TreeParams& tree, int s, double gamma, double lambda) {
    const SpectralLocus at = locate(tree, lambda);
    if (at.in_band) return kInf;
    const GapWindow w = make_gap_window(tree, at.index);
    if (s > 0) {
        if (w.lambda_minus == -kInf) return 0.0; // gap 0: rho == 0, F_+ == 0
        const double d = lambda - w.lambda_minus;
        return d > 0 ? std::pow(d, -1.0 / (2.0 * gamma)) : kInf;
    }
    const double d = w.lambda_plus - lambda;
    return d > 0 ? std::pow(d, -1.0 / (2.0 * gamma)) : kInf;
}

// Tail-tolerance cutoff: |integrand| <= C u^{-gamma} by the Holder bound, so
// integrating to U leaves at most C U^{1-gamma}/(gamma-1).
double tolerance_limit(double gamma, double abs_tol) {
    if (gamma <= 1.0)
        throw std::invalid_argument("F/G integral diverges: gamma <= 1 at a gap edge "
                                    "(lambda not 1-admissible)");
    const double c_safe = 4.0;
    return std::pow(c_safe / ((gamma - 1.0) * abs_tol), 1.0 / (gamma - 1.0));
}

} // namespace

double coefficient_F(const TreeParams& tree, Sign sign, double gamma, double sigma,
                     double lambda) {
    if (!(gamma > 0)) throw std::invalid_argument("coefficient_F: gamma must be > 0");
    if (!(sigma > 0)) throw std::invalid_argument("coefficient_F: sigma must be > 0");
    const int s = to_int(sign);
    const double rho_l = rho_at(tree, lambda);
    if (s > 0 && rho_l == 0.0) return 0.0;

    double U = support_limit(tree, s, gamma, lambda);
    if (U <= sigma) return 0.0;
    if (!std::isfinite(U)) U = std::max(tolerance_limit(gamma, 1e-8), 2.0 * sigma);

    auto f = [&](double u) {
        const double w = std::pow(u, -2.0 * gamma);
        return s * (rho_l - rho_at(tree, lambda - s * w));
    };
    return piecewise_integrate(f, sigma, U,
                               integrand_breakpoints(tree, s, gamma, lambda, sigma, U), 1e-9);
}

double coefficient_G(const TreeParams& tree, Sign sign, double gamma, double sigma,
                     double lambda1, double lambda2, GRoute route) {
    if (!(lambda1 <= lambda2)) throw std::invalid_argument("coefficient_G: lambda1 > lambda2");
    const int s = to_int(sign);
    if (route == GRoute::f_difference)
        return s * (coefficient_F(tree, sign, gamma, sigma, lambda1) -
                    coefficient_F(tree, sign, gamma, sigma, lambda2));

    if (!(sigma > 0)) throw std::invalid_argument("coefficient_G: sigma must be > 0");
    double U1 = support_limit(tree, s, gamma, lambda1);
    double U2 = support_limit(tree, s, gamma, lambda2);
    double U = std::max(U1, U2);
    if (U <= sigma) return 0.0;
    if (!std::isfinite(U)) U = std::max(tolerance_limit(gamma, 1e-8), 2.0 * sigma);

    auto f = [&](double u) {
        const double w = std::pow(u, -2.0 * gamma);
        return rho_at(tree, lambda2 - s * w) - rho_at(tree, lambda1 - s * w);
    };
    auto br = integrand_breakpoints(tree, s, gamma, lambda1, sigma, U);
    auto br2 = integrand_breakpoints(tree, s, gamma, lambda2, sigma, U);
    br.insert(br.end(), br2.begin(), br2.end());
    std::sort(br.begin(), br.end());
    return piecewise_integrate(f, sigma, U, br, 1e-9);
}

double nonweyl_coefficient(const TreeParams& tree, Sign sign, double gamma, double lambda,
                           NonWeylRoute route) {
    if (!(gamma > 0)) throw std::invalid_argument("nonweyl_coefficient: gamma must be > 0");
    if (sign == Sign::minus && gamma >= 2.0)
        throw std::invalid_argument("nonweyl_coefficient: sign=-1 requires gamma < 2 "
                                    "(Weyl / critical regime otherwise)");
    const int s = to_int(sign);
    const double rho_l = rho_at(tree, lambda);
    if (s > 0 && rho_l == 0.0) return 0.0;

    double U = support_limit(tree, s, gamma, lambda);
    if (U == 0.0) return 0.0;
    if (!std::isfinite(U)) {
        if (gamma <= 2.0)
            throw std::invalid_argument("nonweyl_coefficient: lambda must be strictly inside "
                                        "the gap for gamma <= 2 (not 2-admissible)");
        U = std::pow(4.0 / ((gamma - 2.0) * 1e-8), 1.0 / (gamma - 2.0));
    }

    if (route == NonWeylRoute::iterated) {
        boost::math::quadrature::tanh_sinh<double> outer(10);
        auto F = [&](double sigma) { return coefficient_F(tree, sign, gamma, sigma, lambda); };
        return outer.integrate(F, 0.0, U, 1e-7);
    }

    auto f = [&](double u) {
        const double w = std::pow(u, -2.0 * gamma);
        if (w > 1e12) {
            // deep-argument branch, evaluated in a cancellation-free form
            if (s > 0) return u * rho_l;               // rho(lambda - w) == 0
            return std::pow(u, 1.0 - gamma) / M_PI - u * rho_l;
        }
        return u * s * (rho_l - rho_at(tree, lambda - s * w));
    };
    return piecewise_integrate(f, 0.0, U,
                               integrand_breakpoints(tree, s, gamma, lambda, 0.0, U), 1e-9);
}

namespace {

double sqrt_q_integral_bounded(const Potential& q, double a, double b) {
    auto f = [&](double t) { return std::sqrt(q(t)); };
    boost::math::quadrature::gauss_kronrod<double, 31> gk;
    double err = 0;
    return gk.integrate(f, a, b, 12, 1e-10, &err);
}

// int_a^inf sqrt(q) dt with the tail handled in closed form for the model
// profiles.
double sqrt_q_integral_tail(const Potential& q, double a) {
    switch (q.kind()) {
    case ProfileKind::power: {
        const double gamma = q.gamma();
        if (gamma <= 1.0)
            throw std::invalid_argument("Weyl coefficient infinite: int sqrt(q) diverges "
                                        "(gamma <= 1 on a half-line)");
        const double T = a + 5.0;
        const double head = sqrt_q_integral_bounded(q, a, T);
        const double base = 1.0 + T + q.shift_k();
        return head + std::sqrt(q.scale()) * std::pow(base, 1.0 - gamma) / (gamma - 1.0);
    }
    case ProfileKind::exponential: {
        const double kappa = q.kappa();
        const double T = a + 5.0 / kappa;
        const double head = sqrt_q_integral_bounded(q, a, T);
        return head + std::sqrt(q.scale()) * std::exp(-kappa * (T + q.shift_k())) / kappa;
    }
    case ProfileKind::tabulated: {
        const double end = q.grid().back() - q.shift_k();
        if (end <= a) {
            if (q.extend_constant() && q.values().back() > 0)
                throw std::invalid_argument("Weyl coefficient infinite: constant tail");
            return 0.0;
        }
        if (q.extend_constant() && q.values().back() > 0)
            throw std::invalid_argument("Weyl coefficient infinite: constant tail");
        return sqrt_q_integral_bounded(q, a, end);
    }
    }
    return 0;
}

} // namespace

double weyl_coefficient(const Potential& q, const Interval& delta) {
    if (delta.bounded())
        return sqrt_q_integral_bounded(q, delta.r1, delta.r2) / M_PI;
    return sqrt_q_integral_tail(q, delta.r1) / M_PI;
}

double weyl_coefficient_flat(const Potential& q) {
    if (q.kind() == ProfileKind::power && q.gamma() <= 2.0)
        throw std::invalid_argument("flat Weyl sum diverges for gamma <= 2");
    double total = 0.0;
    for (int k = 0; k < 1000000; ++k) {
        const double term = weyl_coefficient(q.shifted(k), Interval{0.0, kInf});
        total += term;
        if (term < 1e-12 * (1.0 + total)) return total;
    }
    throw std::runtime_error("flat Weyl sum failed to converge");
}

double weyl_coefficient_tree(const TreeParams& tree, const Potential& q) {
    if (q.kind() != ProfileKind::exponential || q.kappa() <= tree.beta)
        throw std::invalid_argument("tree Weyl sum diverges unless kappa > ln b");
    double total = weyl_coefficient(q, Interval{0.0, kInf});
    double weight = 1.0;
    const double ratio = tree.b; // n_k ~ b^k
    for (int k = 1; k < 100000; ++k) {
        weight *= ratio;
        const double nk = weight * (1.0 - 1.0 / tree.b);
        const double term = nk * weyl_coefficient(q.shifted(k), Interval{0.0, kInf});
        total += term;
        if (term < 1e-12 * (1.0 + total)) return total;
    }
    throw std::runtime_error("tree Weyl sum failed to converge");
}

AsymptoticLaw predicted_law(LawKind kind, const TreeParams& tree, const LawParams& p) {
    AsymptoticLaw law;
    law.kind = kind;
    switch (kind) {
    case LawKind::weyl: {
        if (p.sign != Sign::minus)
            throw std::invalid_argument("Weyl law holds for sign = -1");
        if (!p.q) throw std::invalid_argument("Weyl law needs the potential profile");
        law.limit = weyl_coefficient(*p.q, p.delta);
        law.normalization = [](double g) { return std::sqrt(g); };
        return law;
    }
    case LawKind::nonweyl_power: {
        if (!(p.gamma > 0) || (p.sign == Sign::minus && p.gamma >= 2.0))
            throw std::invalid_argument("non-Weyl power law needs gamma in (0,2) for sign=-1 "
                                        "or any gamma > 0 for sign=+1");
        law.limit = nonweyl_coefficient(tree, p.sign, p.gamma, p.lambda);
        const double inv_gamma = 1.0 / p.gamma;
        law.normalization = [inv_gamma](double g) { return std::pow(g, inv_gamma); };
        return law;
    }
    case LawKind::critical_gamma2: {
        if (p.sign != Sign::minus || std::abs(p.gamma - 2.0) > 1e-12)
            throw std::invalid_argument("critical power law requires sign=-1, gamma=2");
        law.limit = 1.0 / (4.0 * M_PI);
        law.normalization = [](double g) { return std::sqrt(g) * std::log(g); };
        return law;
    }
    case LawKind::exp_tilde_m: {
        if (p.sign != Sign::plus || !(p.kappa > 0))
            throw std::invalid_argument("exp tilde-M law requires sign=+1, kappa>0");
        law.limit = rho(tree, p.lambda) / (8.0 * p.kappa * p.kappa);
        law.normalization = [](double g) { const double l = std::log(g); return l * l; };
        return law;
    }
    case LawKind::exp_critical_kappa: {
        if (p.sign != Sign::minus)
            throw std::invalid_argument("critical exponential law requires sign=-1");
        if (!(std::abs(p.kappa - tree.beta) <= 1e-9 * tree.beta))
            throw std::invalid_argument("critical exponential law requires kappa = ln b exactly");
        law.limit = (1.0 - 1.0 / tree.b) / (2.0 * M_PI * p.kappa * p.kappa);
        law.normalization = [](double g) { return std::sqrt(g) * std::log(g); };
        return law;
    }
    case LawKind::ln_m_rate: {
        if (!(p.gamma > 0)) throw std::invalid_argument("ln M rate requires a power profile");
        const SpectralLocus at = locate(tree, p.lambda);
        if (at.in_band) throw std::invalid_argument("ln M rate: lambda must lie in a gap");
        const GapWindow w = make_gap_window(tree, at.index);
        const double d = (p.sign == Sign::minus) ? w.lambda_plus - p.lambda
                                                 : p.lambda - w.lambda_minus;
        if (!(d > 0) || !std::isfinite(d))
            throw std::invalid_argument("ln M rate: lambda must be strictly inside a finite gap side");
        law.limit = tree.beta * std::pow(d, -1.0 / (2.0 * p.gamma));
        law.log_scale = true;
        const double inv2g = 1.0 / (2.0 * p.gamma);
        law.normalization = [inv2g](double g) { return std::pow(g, inv2g); };
        return law;
    }
    case LawKind::renewal_periodic: {
        if (!(p.kappa > 0))
            throw std::invalid_argument("renewal law requires an exponential profile");
        if (p.q && !p.q->exact_exponential())
            throw std::invalid_argument("renewal law requires the exact profile e^{-2 kappa t}");
        law.limit = kNaN; // profile-valued: see renewal_extract
        const double expn = tree.beta / (2.0 * p.kappa);
        law.normalization = [expn](double g) { return std::pow(g, expn); };
        return law;
    }
    }
    throw std::logic_error("predicted_law: unknown kind");
}

RenewalProfile renewal_extract(const std::vector<std::pair<double, double>>& samples,
                               double kappa) {
    if (!(kappa > 0)) throw std::invalid_argument("renewal_extract: kappa must be > 0");
    if (samples.size() < 8) throw std::invalid_argument("renewal_extract: too few samples");
    const double period = 2.0 * kappa;
    double lo = kInf, hi = -kInf;
    for (const auto& [x, v] : samples) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        (void)v;
    }
    const double span = hi - lo;
    if (span < 3.0 * period - 1e-12)
        throw std::invalid_argument("renewal_extract: samples must span >= 3 periods of 2 kappa");

    RenewalProfile out;
    out.period = period;
    const int nb = out.bins_per_period;
    const int n_periods = static_cast<int>(std::floor(span / period + 1e-12));
    out.n_periods = n_periods;

    // bin means per period, counted from the top so the last periods are complete
    auto bin_of = [&](double x) {
        double ph = std::fmod(x - lo, period);
        if (ph < 0) ph += period;
        int b = static_cast<int>(ph / period * nb);
        return std::min(b, nb - 1);
    };
    const double top = lo + n_periods * period; // fold periods ending at `top`
    std::vector<double> sum_last(nb, 0), sum_prev(nb, 0), sum_both(nb, 0);
    std::vector<int> n_last(nb, 0), n_prev(nb, 0), n_both(nb, 0);
    for (const auto& [x, v] : samples) {
        if (x > top + 1e-12) continue;
        const int p_from_top = static_cast<int>(std::floor((top - x) / period - 1e-12));
        const int b = bin_of(x);
        if (p_from_top == 0) {
            sum_last[b] += v;
            ++n_last[b];
        } else if (p_from_top == 1) {
            sum_prev[b] += v;
            ++n_prev[b];
        }
        if (p_from_top <= 1) {
            sum_both[b] += v;
            ++n_both[b];
        }
    }
    out.last.assign(nb, kNaN);
    out.prev.assign(nb, kNaN);
    out.profile.assign(nb, kNaN);
    double resid = 0, minv = kInf, meanv = 0;
    int n_mean = 0;
    for (int b = 0; b < nb; ++b) {
        if (n_last[b]) out.last[b] = sum_last[b] / n_last[b];
        if (n_prev[b]) out.prev[b] = sum_prev[b] / n_prev[b];
        if (n_both[b]) {
            out.profile[b] = sum_both[b] / n_both[b];
            minv = std::min(minv, out.profile[b]);
            meanv += out.profile[b];
            ++n_mean;
        }
        if (n_last[b] && n_prev[b])
            resid = std::max(resid, std::abs(out.last[b] - out.prev[b]));
    }
    if (n_mean == 0) throw std::invalid_argument("renewal_extract: empty folded profile");
    out.residual = resid;
    out.min_value = minv;
    out.mean_value = meanv / n_mean;
    return out;
}

} // namespace gapspectra
