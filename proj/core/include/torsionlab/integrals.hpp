#pragma once

#include "torsionlab/field.hpp"
#include "torsionlab/grid.hpp"

namespace torsionlab {

/// Dirichlet energy sum over edges of coeff * measure * (xi_a - xi_b)^2,
/// boundary couplings against the zero extension included. Equals xi^T K xi.
double gradient_energy(const Grid& grid, const ScalarField& xi);

double integrate(const Grid& grid, const ScalarField& f);
double inner(const Grid& grid, const ScalarField& f, const ScalarField& g);
/// Weighted inner product sum_j m_j w_j f_j g_j.
double inner(const Grid& grid, const ScalarField& f, const ScalarField& g, const ScalarField& weight);

/// Integral of xi against nu: density quadrature plus xi(node) * mass for each atom.
double pair_measure(const Grid& grid, const ScalarField& xi, const DiscreteMeasure& nu);

/// Applies the discrete Laplacian L = M^{-1} K (zero Dirichlet extension).
ScalarField apply_laplacian(const Grid& grid, const ScalarField& xi);

}  // namespace torsionlab
