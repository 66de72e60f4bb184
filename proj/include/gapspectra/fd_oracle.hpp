#pragma once

#include "gapspectra/model.hpp"

#include <cstdint>
#include <vector>

namespace gapspectra {

/// P1 Galerkin discretization of the weighted form
///   int_Delta (|phi'|^2 + V |phi|^2) w(t) dt,  w(t) = b^k on [k-1, k),
/// which is unitarily equivalent to A_{V,Delta}. Continuity of phi replaces
/// the b-jump matching conditions, so this path shares nothing with the
/// Prufer solver. Matrices are symmetric tridiagonal after removing the
/// Dirichlet end nodes.
struct DiscretizedForm {
    int b = 2;
    double r1 = 0, r2 = 0, h = 0;
    std::vector<double> kd, ko; // stiffness+potential: diagonal, off-diagonal
    std::vector<double> md, mo; // mass: diagonal, off-diagonal
    double weighted_length = 0; // int_Delta w(t) dt, for the telescoping check

    std::size_t dim() const { return kd.size(); }
};

/// Mesh width h must divide 1 (so integers are nodes); at least 8 nodes per unit.
/// Interval ends may be off-grid; the first/last elements are then shortened.
DiscretizedForm assemble(const TreeParams& tree, Sign sign, const Potential& q, double g,
                         const Interval& delta, double h);

/// Sylvester inertia of K - lambda*M via banded LDL^T: the number of
/// discretized eigenvalues below lambda. Throws when lambda is too close to a
/// discrete eigenvalue (tiny pivot).
long long inertia_count(const DiscretizedForm& form, double lambda);

/// Lowest generalized eigenvalues of (K, M), ascending, located by bisection
/// on the inertia staircase. Dimension capped at 20000.
std::vector<double> dense_eigs(const DiscretizedForm& form, std::size_t n_lowest);

} // namespace gapspectra
