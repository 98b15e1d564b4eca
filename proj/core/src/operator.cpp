#include "torsionlab/operator.hpp"

#include <algorithm>
#include <cmath>

#include "torsionlab/error.hpp"

namespace torsionlab {

SchroedingerOperator::SchroedingerOperator(ScalarField potential, NodeMask active)
    : potential_(std::move(potential)), active_(std::move(active)) {
  const Grid& grid = *potential_.grid();
  if (active_.size() != grid.size()) throw PreconditionError("active mask length does not match the grid");
  node_to_compact_.assign(grid.size(), -1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (active_[i]) {
      node_to_compact_[i] = static_cast<std::ptrdiff_t>(compact_to_node_.size());
      compact_to_node_.push_back(i);
    }
  }
  const auto n = static_cast<Eigen::Index>(compact_to_node_.size());
  const auto weights = grid.quad_weights();
  std::vector<double> diagonal(compact_to_node_.size(), 0.0);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(grid.edges().size() * 2 + compact_to_node_.size());
  for (const Edge& e : grid.edges()) {
    const auto a = node_to_compact_[e.a];
    const auto b = node_to_compact_[e.b];
    const double w = e.weight();
    if (a >= 0) diagonal[a] += w;
    if (b >= 0) diagonal[b] += w;
    if (a >= 0 && b >= 0) {
      triplets.emplace_back(a, b, -w);
      triplets.emplace_back(b, a, -w);
    }
  }
  for (const BoundaryEdge& be : grid.boundary_edges()) {
    const auto a = node_to_compact_[be.node];
    if (a >= 0) diagonal[a] += be.weight();
  }
  mass_.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t node = compact_to_node_[k];
    mass_[k] = weights[node];
    triplets.emplace_back(k, k, diagonal[k] + weights[node] * potential_[node]);
  }
  auto matrix = std::make_shared<SparseMatrix>(n, n);
  matrix->setFromTriplets(triplets.begin(), triplets.end());
  matrix->makeCompressed();
  matrix_ = std::move(matrix);
}

SchroedingerOperator SchroedingerOperator::positive_part(const SplitPotential& split) {
  NodeMask active(split.hard_mask.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = split.hard_mask[i] ? 0 : 1;
  return {split.vplus, std::move(active)};
}

SchroedingerOperator SchroedingerOperator::full(const SplitPotential& split) {
  NodeMask active(split.hard_mask.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = split.hard_mask[i] ? 0 : 1;
  return {split.signed_values(), std::move(active)};
}

SchroedingerOperator SchroedingerOperator::laplacian(const GridPtr& grid) {
  return {ScalarField(grid), NodeMask(grid->size(), 1)};
}

SchroedingerOperator SchroedingerOperator::restricted(const NodeMask& region) const {
  if (region.size() != active_.size()) throw PreconditionError("region mask length does not match the grid");
  NodeMask active(active_.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = (active_[i] && region[i]) ? 1 : 0;
  return {potential_, std::move(active)};
}

SchroedingerOperator SchroedingerOperator::shifted(double c) const {
  ScalarField v = potential_;
  for (double& x : v.values()) x += c;
  return {std::move(v), active_};
}

Vector SchroedingerOperator::gather(const ScalarField& field) const {
  require_same_grid(field, potential_);
  Vector out(static_cast<Eigen::Index>(compact_to_node_.size()));
  for (std::size_t k = 0; k < compact_to_node_.size(); ++k) out[static_cast<Eigen::Index>(k)] = field[compact_to_node_[k]];
  return out;
}

ScalarField SchroedingerOperator::scatter(const Vector& compact) const {
  ScalarField out(potential_.grid());
  for (std::size_t k = 0; k < compact_to_node_.size(); ++k) out[compact_to_node_[k]] = compact[static_cast<Eigen::Index>(k)];
  return out;
}

Vector SchroedingerOperator::load(const DiscreteMeasure& measure) const {
  require_same_grid(measure.density, potential_);
  Vector b = mass_.cwiseProduct(gather(measure.density));
  for (const Atom& atom : measure.atoms) {
    if (atom.node >= active_.size() || !active_[atom.node]) {
      throw PreconditionError("atom on an inactive node");
    }
    b[node_to_compact_[atom.node]] += atom.mass;
  }
  return b;
}

double SchroedingerOperator::energy(const ScalarField& xi) const {
  const Vector x = gather(xi);
  return x.dot(*matrix_ * x);
}

ScalarField SchroedingerOperator::apply(const ScalarField& xi) const {
  return scatter(*matrix_ * gather(xi));
}

bool SchroedingerOperator::potential_nonnegative() const {
  for (std::size_t node : compact_to_node_) {
    if (potential_[node] < 0.0) return false;
  }
  return true;
}

Vector conjugate_gradient(const SparseMatrix& a, const Vector& b, const SolveOptions& options, SolveStats* stats) {
  const Eigen::Index n = b.size();
  Vector x = Vector::Zero(n);
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }
  const Vector inv_diag = a.diagonal().cwiseInverse();
  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  const std::size_t max_it = options.max_iterations ? options.max_iterations : 20 * static_cast<std::size_t>(n) + 100;
  double rel = 1.0;
  std::size_t it = 0;
  for (; it < max_it; ++it) {
    rel = r.norm() / b_norm;
    if (rel <= options.rel_tol) break;
    const Vector ap = a * p;
    const double alpha = rz / p.dot(ap);
    x.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  // Recompute the true residual; the recursive one drifts.
  rel = (b - a * x).norm() / b_norm;
  if (stats) *stats = {it, rel};
  if (rel > options.rel_tol * 10.0) throw SolverError("conjugate gradient did not converge", rel);
  return x;
}

SpdFactorization::SpdFactorization(const SparseMatrix& a) {
  ldlt_.compute(a);
  check();
}

void SpdFactorization::refactor(const SparseMatrix& a) {
  ldlt_.factorize(a);
  check();
}

void SpdFactorization::check() {
  positive_definite_ = ldlt_.info() == Eigen::Success && ldlt_.vectorD().size() > 0 && ldlt_.vectorD().minCoeff() > 0.0;
}

Vector SpdFactorization::solve(const Vector& b) const {
  if (!positive_definite_) throw SolverError("matrix is not positive definite", 0.0);
  return ldlt_.solve(b);
}

Vector solve_spd(const SparseMatrix& a, const Vector& b, const SolveOptions& options, SolveStats* stats) {
  if (options.method == SolverMethod::cholesky) {
    SpdFactorization factor(a);
    Vector x = factor.solve(b);
    if (stats) *stats = {1, b.norm() > 0 ? (b - a * x).norm() / b.norm() : 0.0};
    return x;
  }
  return conjugate_gradient(a, b, options, stats);
}

}  // namespace torsionlab
