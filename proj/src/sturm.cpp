#include "gapspectra/sturm.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace gapspectra {

namespace {

// Phase equation for u'' = (V - lambda) u in the polar form u = beta sin(xi),
// u' = beta f cos(xi) with weight f = sqrt(lam0 + max(lambda - V, 0)),
// lam0 = |lambda| + 1. xi' = f > 0 at every multiple of pi, so floor(xi/pi)
// counts solution zeros exactly.
struct PhaseProblem {
    const Potential* q = nullptr; // nullptr: free problem
    double sgn_g = 0;
    double lambda = 0;
    double lam0 = 1;

    void operator()(const double& xi, double& dxi, double t) const {
        const double v = q ? sgn_g * (*q)(t) : 0.0;
        const double a = lambda - v;
        const double s = std::sin(xi);
        if (a > 0) {
            const double f2 = lam0 + a;
            const double f = std::sqrt(f2);
            const double vp = q ? sgn_g * q->slope(t) : 0.0;
            dxi = f - (lam0 / f) * s * s - (vp / (2.0 * f2)) * s * std::cos(xi);
        } else {
            const double f = std::sqrt(lam0);
            dxi = f - ((lam0 - a) / f) * s * s;
        }
    }
};

// tan(xi+) = b tan(xi-), same quadrant, branch index preserved: the matching
// jump y -> sqrt(b) y, y' -> y'/sqrt(b) at integer vertices.
double apply_vertex_jump(double xi, int b) {
    double m = std::floor(xi / M_PI);
    double th = xi - m * M_PI;
    if (th < 0) { th += M_PI; m -= 1.0; }
    if (th >= M_PI) { th -= M_PI; m += 1.0; }
    double tn = std::atan2(b * std::sin(th), std::cos(th));
    if (tn < 0) tn = 0.0; // sin(th) >= 0 keeps atan2 in [0, pi]; guard rounding
    if (tn >= M_PI) tn = std::nextafter(M_PI, 0.0);
    return m * M_PI + tn;
}

using ode_stepper =
    boost::numeric::odeint::runge_kutta_cash_karp54<double, double, double, double,
                                                    boost::numeric::odeint::vector_space_algebra>;

void integrate_segment(const PhaseProblem& pr, double& xi, double a, double b,
                       const SturmOptions& opts, std::size_t& steps) {
    auto ctrl = boost::numeric::odeint::make_controlled<ode_stepper>(opts.abs_tol, opts.rel_tol);
    double t = a;
    double d0 = 0;
    pr(xi, d0, a);
    double dt = std::min(b - a, 0.1 / (1.0 + std::abs(d0)));
    while (t < b) {
        if (dt > b - t) dt = b - t;
        if (!(dt > 0) || dt < 1e-15 * (1.0 + std::abs(t)))
            throw std::runtime_error("ODE step failure in phase integration");
        ctrl.try_step(pr, xi, t, dt);
        if (++steps > opts.max_steps)
            throw std::runtime_error("phase integration exceeded step budget");
    }
}

double final_phase(const TreeParams& tree, const PhaseProblem& pr, const Interval& delta,
                   const SturmOptions& opts) {
    double xi = 0.0;
    double t = delta.r1;
    std::size_t steps = 0;
    const double first = std::floor(delta.r1) + 1.0;
    for (double n = first; n < delta.r2; n += 1.0) {
        integrate_segment(pr, xi, t, n, opts, steps);
        xi = apply_vertex_jump(xi, tree.b);
        t = n;
    }
    integrate_segment(pr, xi, t, delta.r2, opts, steps);
    return xi;
}

CountResult count_from_phase(double xi, const SturmOptions& opts) {
    CountResult r;
    r.value = static_cast<long long>(std::floor(xi / M_PI));
    r.ode_tolerance = opts.rel_tol;
    const double th = xi - std::floor(xi / M_PI) * M_PI;
    if (std::min(th, M_PI - th) < opts.phase_margin)
        r.warnings.push_back("lambda near an eigenvalue: count may be off by 1");
    return r;
}

void merge_warnings(CountResult& into, const CountResult& from) {
    for (const auto& w : from.warnings)
        if (std::find(into.warnings.begin(), into.warnings.end(), w) == into.warnings.end())
            into.warnings.push_back(w);
}

void require_admissible(const Potential& q, Sign sign, double lambda, const GapWindow& w,
                        double gamma0) {
    if (q.kind() != ProfileKind::power) return; // exponential decay: always admissible
    if (q.gamma() > gamma0) return;
    const double slack = 1e-12 * (1.0 + std::abs(lambda));
    if (sign == Sign::plus && !(lambda > w.lambda_minus + slack))
        throw std::invalid_argument("lambda not admissible: infinite count at the lower gap edge");
    if (sign == Sign::minus && !(lambda < w.lambda_plus - slack))
        throw std::invalid_argument("lambda not admissible: infinite count at the upper gap edge");
}

CountResult count_M_bounded(const TreeParams& tree, Sign sign, const Potential& q, double g,
                            double lambda, const Interval& delta, const SturmOptions& opts) {
    CountResult out;
    out.ode_tolerance = opts.rel_tol;
    if (sign == Sign::minus) {
        const CountResult with = count_N(tree, sign, q, g, lambda, delta, opts);
        const CountResult free = count_N_free(tree, lambda, delta, opts);
        out.value = std::max(0LL, with.value - free.value);
        merge_warnings(out, with);
        merge_warnings(out, free);
        return out;
    }
    // V >= 0: right limit lambda+ (Eq-level convention), realized as lambda + eps.
    const double eps = 1e-9 * (1.0 + std::abs(lambda));
    auto at = [&](double lam) {
        const CountResult free = count_N_free(tree, lam, delta, opts);
        const CountResult with = count_N(tree, sign, q, g, lam, delta, opts);
        merge_warnings(out, free);
        merge_warnings(out, with);
        return free.value - with.value;
    };
    const long long v1 = at(lambda + eps);
    const long long v2 = at(lambda + 2 * eps);
    out.value = std::max(0LL, v1);
    if (v1 != v2)
        out.warnings.push_back("right-limit count differs between eps and 2*eps");
    return out;
}

} // namespace

double crossing_gap_distance(const GapWindow& window, Sign sign, double lambda) {
    double d = kInf;
    if (sign == Sign::minus) {
        // branches descend: sources are spectrum points above lambda
        d = std::min(d, window.lambda_plus - lambda);
        if (window.mid && *window.mid > lambda) d = std::min(d, *window.mid - lambda);
    } else {
        // branches ascend: sources are spectrum points below lambda
        if (window.lambda_minus > -kInf) d = std::min(d, lambda - window.lambda_minus);
        if (window.mid && *window.mid < lambda) d = std::min(d, lambda - *window.mid);
    }
    return std::max(d, 0.0);
}

double window_vanish_distance(const GapWindow& window, Sign sign, double lambda1,
                              double lambda2) {
    if (sign == Sign::minus) {
        double src = window.lambda_plus;
        if (window.mid && *window.mid > lambda1) src = std::min(src, *window.mid);
        return std::max(src - lambda2, 0.0);
    }
    double src = window.lambda_minus;
    if (window.mid && *window.mid < lambda2) src = std::max(src, *window.mid);
    if (src == -kInf) return kInf;
    return std::max(lambda1 - src, 0.0);
}

CountResult count_N(const TreeParams& tree, Sign sign, const Potential& q, double g,
                    double lambda, const Interval& delta, const SturmOptions& opts) {
    if (!delta.bounded()) throw std::invalid_argument("count_N requires a bounded interval");
    if (!(delta.r1 >= 0 && delta.r1 < delta.r2))
        throw std::invalid_argument("count_N: invalid interval");
    if (!std::isfinite(lambda)) throw std::invalid_argument("count_N: lambda must be finite");
    PhaseProblem pr;
    pr.q = (g != 0.0) ? &q : nullptr;
    pr.sgn_g = to_int(sign) * g;
    pr.lambda = lambda;
    pr.lam0 = std::abs(lambda) + 1.0;
    const double xi = final_phase(tree, pr, delta, opts);
    return count_from_phase(xi, opts);
}

CountResult count_N_free(const TreeParams& tree, double lambda, const Interval& delta,
                         const SturmOptions& opts) {
    PhaseProblem pr;
    pr.lambda = lambda;
    pr.lam0 = std::abs(lambda) + 1.0;
    if (!delta.bounded()) throw std::invalid_argument("count_N requires a bounded interval");
    const double xi = final_phase(tree, pr, delta, opts);
    return count_from_phase(xi, opts);
}

CountResult count_M(const TreeParams& tree, Sign sign, const Potential& q, double g,
                    double lambda, const Interval& delta, const GapWindow& window,
                    const SturmOptions& opts) {
    if (g < 0) throw std::invalid_argument("count_M: g must be >= 0");
    const double slack = 1e-9 * (1.0 + std::abs(lambda));
    if (!(lambda >= window.lambda_minus - slack && lambda <= window.lambda_plus + slack))
        throw std::invalid_argument("count_M: lambda outside the gap window closure");
    require_admissible(q, sign, lambda, window, 1.0);
    if (g == 0.0) {
        CountResult zero;
        zero.ode_tolerance = opts.rel_tol;
        return zero;
    }
    if (delta.bounded()) return count_M_bounded(tree, sign, q, g, lambda, delta, opts);

    // Half-line: truncate where the tail can no longer move any branch across
    // lambda, then double the radius until the count stops changing.
    const double dist = crossing_gap_distance(window, sign, lambda);
    double T = opts.initial_truncation;
    if (dist > 0 && std::isfinite(dist)) {
        while (g * q.tail_sup(delta.r1 + T) >= 0.5 * dist && T < opts.max_truncation) T *= 2;
    } else if (!std::isfinite(dist)) {
        // nothing below lambda to cross from: the count is identically zero,
        // still verified on a short interval
        T = opts.initial_truncation;
    } else {
        throw std::invalid_argument("count_M: lambda at a gap edge or mid eigenvalue, "
                                    "no finite truncation radius");
    }
    CountResult prev = count_M_bounded(tree, sign, q, g, lambda,
                                       Interval{delta.r1, delta.r1 + T}, opts);
    for (int i = 0; i < 48; ++i) {
        const double T2 = 2 * T;
        if (T2 > opts.max_truncation)
            throw std::runtime_error("count_M: truncation radius exceeded the cap before stabilizing");
        CountResult cur = count_M_bounded(tree, sign, q, g, lambda,
                                          Interval{delta.r1, delta.r1 + T2}, opts);
        merge_warnings(cur, prev);
        if (cur.value == prev.value) {
            cur.truncation_radius = T2;
            return cur;
        }
        prev = cur;
        T = T2;
    }
    throw std::runtime_error("count_M: truncation did not stabilize");
}

CountResult count_window(const TreeParams& tree, Sign sign, const Potential& q, double g,
                         double lambda1, double lambda2, const Interval& delta,
                         const GapWindow& window, const SturmOptions& opts) {
    if (!(lambda1 <= lambda2))
        throw std::invalid_argument("count_window: requires lambda1 <= lambda2");
    const double slack = 1e-9 * (1.0 + std::abs(lambda2));
    if (lambda1 < window.lambda_minus - slack || lambda2 > window.lambda_plus + slack)
        throw std::invalid_argument("count_window: window must lie in one gap closure");
    require_admissible(q, sign, lambda1, window, 1.0);
    require_admissible(q, sign, lambda2, window, 1.0);
    CountResult out;
    out.ode_tolerance = opts.rel_tol;
    if (lambda1 == lambda2) return out;

    auto bounded_diff = [&](const Interval& dd) {
        CountResult hi = (g == 0.0) ? count_N_free(tree, lambda2, dd, opts)
                                    : count_N(tree, sign, q, g, lambda2, dd, opts);
        CountResult lo = (g == 0.0) ? count_N_free(tree, lambda1, dd, opts)
                                    : count_N(tree, sign, q, g, lambda1, dd, opts);
        CountResult r;
        r.ode_tolerance = opts.rel_tol;
        r.value = hi.value - lo.value;
        merge_warnings(r, hi);
        merge_warnings(r, lo);
        return r;
    };
    if (delta.bounded()) return bounded_diff(delta);

    double dist = window_vanish_distance(window, sign, lambda1, lambda2);
    if (!std::isfinite(dist)) dist = 0.0; // sign=+1 in gap 0: count is zero anyway
    double T = opts.initial_truncation;
    if (dist > 0) {
        while (g * q.tail_sup(delta.r1 + T) >= 0.5 * dist && T < opts.max_truncation) T *= 2;
    }
    CountResult prev = bounded_diff(Interval{delta.r1, delta.r1 + T});
    for (int i = 0; i < 48; ++i) {
        const double T2 = 2 * T;
        if (T2 > opts.max_truncation)
            throw std::runtime_error("count_window: truncation radius exceeded the cap");
        CountResult cur = bounded_diff(Interval{delta.r1, delta.r1 + T2});
        merge_warnings(cur, prev);
        if (cur.value == prev.value) {
            cur.truncation_radius = T2;
            return cur;
        }
        prev = cur;
        T = T2;
    }
    throw std::runtime_error("count_window: truncation did not stabilize");
}

std::vector<double> eigenvalues_in_window(const TreeParams& tree, Sign sign,
                                          const Potential& q, double g,
                                          const Interval& delta, double lambda1,
                                          double lambda2, double tol,
                                          const SturmOptions& opts) {
    if (!delta.bounded())
        throw std::invalid_argument("eigenvalues_in_window requires a bounded interval");
    if (!(lambda1 <= lambda2)) throw std::invalid_argument("eigenvalues_in_window: bad window");
    const double min_tol = 1e-10 * (1.0 + std::abs(lambda2));
    if (tol < min_tol)
        throw std::invalid_argument("eigenvalues_in_window: tolerance below phase resolution");
    auto count = [&](double lam) {
        return (g == 0.0) ? count_N_free(tree, lam, delta, opts).value
                          : count_N(tree, sign, q, g, lam, delta, opts).value;
    };
    std::vector<double> out;
    std::function<void(double, double, long long, long long)> rec =
        [&](double lo, double hi, long long clo, long long chi) {
            if (chi <= clo) return;
            if (hi - lo <= tol) {
                for (long long i = 0; i < chi - clo; ++i) out.push_back(0.5 * (lo + hi));
                return;
            }
            const double mid = 0.5 * (lo + hi);
            const long long cm = count(mid);
            rec(lo, mid, clo, cm);
            rec(mid, hi, cm, chi);
        };
    rec(lambda1, lambda2, count(lambda1), count(lambda2));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace gapspectra
