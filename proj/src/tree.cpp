#include "gapspectra/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gapspectra {

double log_big(const BigInt& v) {
    if (v <= 0) return -kInf;
    const unsigned bits = boost::multiprecision::msb(v);
    if (bits <= 52) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 52;
    const BigInt top = v >> shift;
    return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GAPSPECTRA_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

int smallest_vanishing_k(const Potential& q, double g, double dist) {
    if (!(dist > 0))
        throw std::invalid_argument("k_max: lambda at a gap edge or mid eigenvalue, "
                                    "no finite truncation index exists");
    if (!std::isfinite(dist)) return 0; // nothing to cross from: the whole sum is zero
    for (int k = 0;; ++k) {
        if (g * q.shifted(k).sup() < dist) return k;
        if (k > 10'000'000) throw std::runtime_error("k_max: no vanishing index below cap");
    }
}

void require_tree_point(const GapWindow& window, double lambda) {
    if (!window.contains(lambda))
        throw std::invalid_argument("tree counts need lambda strictly inside the gap");
    if (window.mid && std::abs(lambda - *window.mid) <= 1e-8 * (1.0 + std::abs(lambda)))
        throw std::invalid_argument("tree counts rejected at the infinite-multiplicity "
                                    "eigenvalue (pi l)^2");
}

struct PerK {
    long long value = 0;
    double truncation = 0;
    std::vector<std::string> warnings;
};

// Runs per-k half-line counts for k = 0..kmax-1, in parallel, with the exact
// exponential reduction q_k = e^{-2 kappa k} q applied where available.
template <class Fn>
std::vector<PerK> per_k_counts(int kmax, int threads, Fn&& one) {
    std::vector<PerK> rows(static_cast<std::size_t>(std::max(kmax, 0)));
    std::exception_ptr eptr = nullptr;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
#endif
    for (int k = 0; k < kmax; ++k) {
        try {
            rows[static_cast<std::size_t>(k)] = one(k);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!eptr) eptr = std::current_exception();
        }
    }
    if (eptr) std::rethrow_exception(eptr);
    return rows;
}

TreeCountResult assemble(const TreeParams& tree, const std::vector<PerK>& rows, bool weighted,
                         bool keep_per_k) {
    TreeCountResult out;
    out.kmax = static_cast<int>(rows.size());
    BigInt weight = 1; // b^{k-1}, first used at k = 1
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const PerK& r = rows[k];
        if (weighted) {
            if (k == 0) {
                out.value += r.value;
            } else {
                out.value += weight * (tree.b - 1) * r.value; // n_k = b^k - b^{k-1}
                weight *= tree.b;
            }
        } else {
            out.value += r.value;
        }
        out.truncation_radius = std::max(out.truncation_radius, r.truncation);
        for (const auto& w : r.warnings)
            if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end())
                out.warnings.push_back(w);
        if (keep_per_k) out.per_k.push_back(r.value);
    }
    return out;
}

} // namespace

int k_max(const TreeParams&, Sign sign, const Potential& q, double g,
          const GapWindow& window, double lambda) {
    return smallest_vanishing_k(q, g, crossing_gap_distance(window, sign, lambda));
}

int k_max_window(const TreeParams&, Sign sign, const Potential& q, double g,
                 const GapWindow& window, double lambda1, double lambda2) {
    return smallest_vanishing_k(q, g, window_vanish_distance(window, sign, lambda1, lambda2));
}

namespace {

TreeCountResult tree_sum_M(const TreeParams& tree, Sign sign, const Potential& q, double g,
                           double lambda, const GapWindow& window, const TreeOptions& opts,
                           bool weighted) {
    require_tree_point(window, lambda);
    const int kmax = k_max(tree, sign, q, g, window, lambda);
    const int threads = resolve_threads(opts.threads);
    const Interval half_line{0.0, kInf};
    const bool exact_exp = q.exact_exponential();
    const double two_kappa = exact_exp ? 2.0 * q.kappa() : 0.0;

    auto one = [&](int k) {
        PerK row;
        CountCache::Key key{0, exact_exp ? 0 : k,
                            exact_exp ? g * std::exp(-two_kappa * k) : g, lambda, 0.0};
        CountResult r;
        if (opts.cache && opts.cache->get(key, r)) {
        } else {
            if (exact_exp)
                r = count_M(tree, sign, q, g * std::exp(-two_kappa * k), lambda, half_line,
                            window, opts.sturm);
            else
                r = count_M(tree, sign, q.shifted(k), g, lambda, half_line, window, opts.sturm);
            if (opts.cache) opts.cache->put(key, r);
        }
        row.value = r.value;
        row.truncation = r.truncation_radius;
        row.warnings = r.warnings;
        return row;
    };
    return assemble(tree, per_k_counts(kmax, threads, one), weighted, opts.keep_per_k);
}

TreeCountResult tree_sum_N(const TreeParams& tree, Sign sign, const Potential& q, double g,
                           double lambda1, double lambda2, const GapWindow& window,
                           const TreeOptions& opts, bool weighted) {
    require_tree_point(window, lambda1);
    require_tree_point(window, lambda2);
    if (!(lambda1 <= lambda2)) throw std::invalid_argument("tree_N: lambda1 > lambda2");
    if (window.mid && lambda1 < *window.mid && lambda2 > *window.mid)
        throw std::invalid_argument("tree_N: window straddles the infinite-multiplicity "
                                    "eigenvalue (pi l)^2");
    const int kmax = k_max_window(tree, sign, q, g, window, lambda1, lambda2);
    const int threads = resolve_threads(opts.threads);
    const Interval half_line{0.0, kInf};
    const bool exact_exp = q.exact_exponential();
    const double two_kappa = exact_exp ? 2.0 * q.kappa() : 0.0;

    auto one = [&](int k) {
        PerK row;
        CountCache::Key key{1, exact_exp ? 0 : k,
                            exact_exp ? g * std::exp(-two_kappa * k) : g, lambda1, lambda2};
        CountResult r;
        if (opts.cache && opts.cache->get(key, r)) {
        } else {
            if (exact_exp)
                r = count_window(tree, sign, q, g * std::exp(-two_kappa * k), lambda1, lambda2,
                                 half_line, window, opts.sturm);
            else
                r = count_window(tree, sign, q.shifted(k), g, lambda1, lambda2, half_line,
                                 window, opts.sturm);
            if (opts.cache) opts.cache->put(key, r);
        }
        row.value = r.value;
        row.truncation = r.truncation_radius;
        row.warnings = r.warnings;
        return row;
    };
    return assemble(tree, per_k_counts(kmax, threads, one), weighted, opts.keep_per_k);
}

} // namespace

TreeCountResult tree_M(const TreeParams& tree, Sign sign, const Potential& q, double g,
                       double lambda, const GapWindow& window, const TreeOptions& opts) {
    return tree_sum_M(tree, sign, q, g, lambda, window, opts, true);
}

TreeCountResult tilde_M(const TreeParams& tree, Sign sign, const Potential& q, double g,
                        double lambda, const GapWindow& window, const TreeOptions& opts) {
    return tree_sum_M(tree, sign, q, g, lambda, window, opts, false);
}

TreeCountResult tree_N(const TreeParams& tree, Sign sign, const Potential& q, double g,
                       double lambda1, double lambda2, const GapWindow& window,
                       const TreeOptions& opts) {
    return tree_sum_N(tree, sign, q, g, lambda1, lambda2, window, opts, true);
}

TreeCountResult tilde_N(const TreeParams& tree, Sign sign, const Potential& q, double g,
                        double lambda1, double lambda2, const GapWindow& window,
                        const TreeOptions& opts) {
    return tree_sum_N(tree, sign, q, g, lambda1, lambda2, window, opts, false);
}

std::vector<double> geometric_grid(double g_min, double g_max, int points_per_decade) {
    if (!(g_min > 0) || !(g_max >= g_min) || points_per_decade < 1)
        throw std::invalid_argument("geometric_grid: need 0 < g_min <= g_max, ppd >= 1");
    std::vector<double> g;
    const double step = 1.0 / points_per_decade;
    const int n = static_cast<int>(std::floor(std::log10(g_max / g_min) / step + 1e-9)) + 1;
    g.reserve(n);
    for (int i = 0; i < n; ++i) g.push_back(g_min * std::pow(10.0, i * step));
    return g;
}

} // namespace gapspectra
