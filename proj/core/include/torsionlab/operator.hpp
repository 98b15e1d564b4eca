#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "torsionlab/field.hpp"
#include "torsionlab/grid.hpp"
#include "torsionlab/potential.hpp"

namespace torsionlab {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// The symmetric matrix A = K + M diag(V) of -Laplace + V on the active nodes.
/// Inactive nodes (hard nodes, nodes outside a region) are pinned to zero, so
/// edges into them act as Dirichlet couplings. Immutable after construction.
class SchroedingerOperator {
 public:
  SchroedingerOperator(ScalarField potential, NodeMask active);

  /// -Laplace + V+ with hard nodes excised.
  static SchroedingerOperator positive_part(const SplitPotential& split);
  /// -Laplace + V+ - V- with hard nodes excised.
  static SchroedingerOperator full(const SplitPotential& split);
  /// -Laplace on every node.
  static SchroedingerOperator laplacian(const GridPtr& grid);

  /// Same potential, active set intersected with `region`.
  SchroedingerOperator restricted(const NodeMask& region) const;
  /// Potential shifted by a constant (active set unchanged).
  SchroedingerOperator shifted(double c) const;

  const GridPtr& grid() const noexcept { return potential_.grid(); }
  const ScalarField& potential() const noexcept { return potential_; }
  const NodeMask& active() const noexcept { return active_; }
  bool is_active(std::size_t node) const noexcept { return active_[node] != 0; }
  std::size_t active_count() const noexcept { return compact_to_node_.size(); }
  std::span<const std::size_t> active_nodes() const noexcept { return compact_to_node_; }
  /// Compact index of a node, -1 when inactive.
  std::ptrdiff_t compact_index(std::size_t node) const noexcept { return node_to_compact_[node]; }

  const SparseMatrix& matrix() const noexcept { return *matrix_; }
  /// Quadrature weights on the active nodes.
  const Vector& mass() const noexcept { return mass_; }

  Vector gather(const ScalarField& field) const;
  ScalarField scatter(const Vector& compact) const;
  /// Right-hand side for a measure: m_j f_j + atom masses. Throws when an atom sits on an inactive node.
  Vector load(const DiscreteMeasure& measure) const;

  /// xi^T A xi with xi restricted to the active nodes.
  double energy(const ScalarField& xi) const;
  /// (A xi)_j on active nodes, 0 elsewhere (not divided by the quadrature weight).
  ScalarField apply(const ScalarField& xi) const;

  bool potential_nonnegative() const;

 private:
  ScalarField potential_;
  NodeMask active_;
  std::vector<std::size_t> compact_to_node_;
  std::vector<std::ptrdiff_t> node_to_compact_;
  std::shared_ptr<const SparseMatrix> matrix_;
  Vector mass_;
};

enum class SolverMethod { conjugate_gradient, cholesky };

struct SolveOptions {
  SolverMethod method = SolverMethod::conjugate_gradient;
  double rel_tol = 1e-10;
  /// 0 selects 20 * n + 100.
  std::size_t max_iterations = 0;
};

struct SolveStats {
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Throws SolverError when the
/// relative residual stays above tolerance.
Vector conjugate_gradient(const SparseMatrix& a, const Vector& b, const SolveOptions& options,
                          SolveStats* stats = nullptr);

/// Sparse LDL^T factorization; also the positive-definiteness probe.
class SpdFactorization {
 public:
  explicit SpdFactorization(const SparseMatrix& a);
  /// Refactorizes a matrix with the same sparsity pattern.
  void refactor(const SparseMatrix& a);
  bool positive_definite() const noexcept { return positive_definite_; }
  /// Throws SolverError when the last factorization was not positive definite.
  Vector solve(const Vector& b) const;

 private:
  void check();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  bool positive_definite_ = false;
};

/// Solves A x = b by the requested method.
Vector solve_spd(const SparseMatrix& a, const Vector& b, const SolveOptions& options, SolveStats* stats = nullptr);

}  // namespace torsionlab
