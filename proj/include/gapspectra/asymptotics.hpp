#pragma once

#include "gapspectra/bandstructure.hpp"
#include "gapspectra/model.hpp"

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace gapspectra {

/// Weyl coefficient (1/pi) int_Delta sqrt(q) dt by adaptive quadrature
/// (analytic tails for the model profiles on unbounded intervals).
/// Throws when the integral diverges (power with gamma <= 1 on a half-line).
double weyl_coefficient(const Potential& q, const Interval& delta);

/// Flat k-sum (1/pi) sum_k int_k^inf sqrt(q): the tilde-count Weyl limit.
/// Requires gamma > 2 for power profiles.
double weyl_coefficient_flat(const Potential& q);

/// Tree-weighted sum (1/pi) sum_k n_k int_k^inf sqrt(q): converges only for
/// exponential decay with kappa > ln b.
double weyl_coefficient_tree(const TreeParams& tree, const Potential& q);

/// F_pm(sigma, lambda) = pm int_0^inf [rho(lambda) - rho(lambda -/+ (s+sigma)^{-2 gamma})] ds,
/// the per-k asymptotic coefficient. Vanishes for sigma >= sigma_pm when lambda
/// is strictly inside the gap.
double coefficient_F(const TreeParams& tree, Sign sign, double gamma, double sigma,
                     double lambda);

enum class GRoute { f_difference, direct };

/// G_pm(sigma, lambda1, lambda2) = pm (F_pm(sigma, lambda1) - F_pm(sigma, lambda2)),
/// also computable by direct quadrature of the rho-difference integrand.
double coefficient_G(const TreeParams& tree, Sign sign, double gamma, double sigma,
                     double lambda1, double lambda2, GRoute route = GRoute::f_difference);

enum class NonWeylRoute { iterated, weighted };

/// Non-Weyl leading coefficient int_0^inf F_pm(sigma, lambda) d sigma
/// = int_0^inf u [rho(lambda) - rho(lambda -/+ u^{-2 gamma})] du.
/// `iterated` evaluates the outer integral over F; `weighted` the single
/// u-weighted integral. The two agree to ~1e-5 and cross-validate each other.
double nonweyl_coefficient(const TreeParams& tree, Sign sign, double gamma, double lambda,
                           NonWeylRoute route = NonWeylRoute::weighted);

enum class LawKind {
    weyl,
    nonweyl_power,
    critical_gamma2,
    exp_tilde_m,
    exp_critical_kappa,
    ln_m_rate,
    renewal_periodic,
};

struct LawParams {
    Sign sign = Sign::minus;
    double gamma = 0;
    double kappa = 0;
    double lambda = 0;
    const Potential* q = nullptr; // required for the Weyl law
    Interval delta{0.0, kInf};
};

/// A predicted leading-order law: normalized(raw, g) tends to `limit` (or is
/// bounded by it, or approaches a periodic profile for the renewal kind).
struct AsymptoticLaw {
    LawKind kind;
    double limit = 0;
    bool upper_bound_only = false;
    bool log_scale = false; // normalized = ln(raw)/normalization(g)
    std::function<double(double)> normalization;

    double normalized(double raw, double g) const {
        const double n = normalization(g);
        return log_scale ? std::log(raw) / n : raw / n;
    }
};

AsymptoticLaw predicted_law(LawKind kind, const TreeParams& tree, const LawParams& p);

/// Folded log-periodic profile extracted from (ln g, normalized value) samples.
struct RenewalProfile {
    double period = 0;
    int bins_per_period = 64;
    std::vector<double> profile;     // combined mean over the last two periods (NaN = empty bin)
    std::vector<double> prev, last;  // per-period binned means
    double residual = 0;             // max |last - prev| over bins populated in both
    double min_value = 0;            // min of the combined profile
    double mean_value = 0;
    int n_periods = 0;
};

/// Samples must span at least 3 periods of length 2*kappa in ln g; values are
/// expected already normalized by g^{beta/(2 kappa)}.
RenewalProfile renewal_extract(const std::vector<std::pair<double, double>>& samples,
                               double kappa);

} // namespace gapspectra
