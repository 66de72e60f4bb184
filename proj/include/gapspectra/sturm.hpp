#pragma once

#include "gapspectra/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gapspectra {

struct SturmOptions {
    double rel_tol = 1e-9;       // ODE relative tolerance
    double abs_tol = 1e-12;      // ODE absolute tolerance
    double phase_margin = 1e-7;  // final-phase distance to a multiple of pi that
                                 // triggers a +-1 warning
    std::size_t max_steps = 200'000'000; // per count call
    double initial_truncation = 4.0;     // half-line counts start from this radius
    double max_truncation = 1.0e7;
};

struct CountResult {
    long long value = 0;
    double truncation_radius = 0.0; // 0 for bounded intervals
    double ode_tolerance = 0.0;
    std::vector<std::string> warnings;

    bool near_eigenvalue() const { return !warnings.empty(); }
};

/// N(lambda; V, Delta): eigenvalues of A_{V,Delta} below lambda, V = sign*g*q,
/// Dirichlet ends, b-jump matching at interior integers. Bounded Delta only.
/// Prufer oscillation count: floor(xi(r2)/pi) with exact phase jumps.
CountResult count_N(const TreeParams& tree, Sign sign, const Potential& q, double g,
                    double lambda, const Interval& delta, const SturmOptions& opts = {});

/// Free counting function N(lambda; 0, Delta).
CountResult count_N_free(const TreeParams& tree, double lambda, const Interval& delta,
                         const SturmOptions& opts = {});

/// M(lambda; sign*g*q, Delta): eigenvalue branches of A_{alpha*sign*g*q} crossing
/// lambda as alpha runs over (0,1). Bounded Delta via the N-difference identities;
/// half-line Delta via truncation at an adaptively doubled radius.
CountResult count_M(const TreeParams& tree, Sign sign, const Potential& q, double g,
                    double lambda, const Interval& delta, const GapWindow& window,
                    const SturmOptions& opts = {});

/// N(lambda1, lambda2; V, Delta): eigenvalues in the window (both endpoints in the
/// closure of the same gap).
CountResult count_window(const TreeParams& tree, Sign sign, const Potential& q, double g,
                         double lambda1, double lambda2, const Interval& delta,
                         const GapWindow& window, const SturmOptions& opts = {});

/// Locate eigenvalues in (lambda1, lambda2) on a bounded interval by bisection of
/// the count_N staircase; each value is returned once per multiplicity step.
std::vector<double> eigenvalues_in_window(const TreeParams& tree, Sign sign,
                                          const Potential& q, double g,
                                          const Interval& delta, double lambda1,
                                          double lambda2, double tol,
                                          const SturmOptions& opts = {});

/// Distance from lambda to the nearest free-spectrum point the perturbed
/// eigenvalue branches depart from (gap edge, and the mid eigenvalue (pi l)^2
/// when it lies on the crossing side). +inf when no branch can reach lambda;
/// 0 at a gap edge or at the mid eigenvalue itself.
double crossing_gap_distance(const GapWindow& window, Sign sign, double lambda);

/// Vanishing threshold for window counts: no eigenvalue can sit inside
/// (lambda1, lambda2) while g * sup q stays below this distance.
double window_vanish_distance(const GapWindow& window, Sign sign, double lambda1,
                              double lambda2);

} // namespace gapspectra
