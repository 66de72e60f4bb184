#pragma once

#include "gapspectra/model.hpp"

#include <vector>

namespace gapspectra {

/// Dispersion phi(xi) = arccos(cos(xi) / R), valued in [theta, pi - theta].
double phi(const TreeParams& tree, double xi);

/// Inverse branch psi(mu) = arccos(R cos(mu)) for mu in [theta, pi - theta].
double psi(const TreeParams& tree, double mu);

struct BandGap {
    int l;           // 1-based band index
    double band_lo;  // (pi(l-1) + theta)^2
    double band_hi;  // (pi l - theta)^2
    double gap_lo;   // band_hi
    double gap_hi;   // (pi l + theta)^2
    double mid;      // (pi l)^2, the simple half-line eigenvalue inside gap l
};

/// Bands b_l and gaps l_l for l = 1..l_max (gap 0 = (-inf, theta^2) is implied).
std::vector<BandGap> bands_and_gaps(const TreeParams& tree, int l_max);

/// Where lambda sits relative to the band/gap structure.
struct SpectralLocus {
    bool in_band;
    int index; // band index (1-based) or gap index (0-based)
};
SpectralLocus locate(const TreeParams& tree, double lambda);

/// Global quasimomentum: omega = pi*l on gap l, the psi-branch formula on bands.
double omega(const TreeParams& tree, double lambda);

/// Integrated density of states rho = omega / pi.
double rho(const TreeParams& tree, double lambda);

/// Roots of q^2 - 2 R q cos(k) + 1 = 0 at k = sqrt(lambda), with |q1| <= 1 <= |q2|,
/// q1 q2 = 1. Only defined off band interiors (R|cos k| >= 1).
struct TransferRoots {
    double q1;
    double q2;
    double sigma;     // -ln|q1|, decay rate of the subordinate solution
    double wronskian; // b^{1/2} (q2 - q1) k sin(k)
};
TransferRoots transfer_roots(const TreeParams& tree, double lambda);

/// Normalized eigenfunction of the half-line free operator at (pi l)^2:
/// c(b) b^{-n/2} sin(pi l t) on (n-1, n), c(b) = sqrt(2(b-1)).
double free_gap_eigenfunction(const TreeParams& tree, int l, double t);

/// Whole-line free solutions at lambda = k^2 built from the transfer roots
/// (j = 1 decaying, j = 2 growing), and the Dirichlet combination y_0.
double free_solution(const TreeParams& tree, double k, int j, double t);
double free_solution_dirichlet(const TreeParams& tree, double k, double t);

} // namespace gapspectra
