#include "torsionlab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torsionlab/error.hpp"
#include "torsionlab/integrals.hpp"

namespace torsionlab {

ScalarField minimize_energy(const SchroedingerOperator& op, const DiscreteMeasure& f, const SolveOptions& options,
                            SolveStats* stats) {
  if (!op.potential_nonnegative()) {
    throw PreconditionError("minimize_energy requires a nonnegative potential (use the V+ operator)");
  }
  const Vector b = op.load(f);
  if (op.active_count() == 0) return ScalarField(op.grid());
  return op.scatter(solve_spd(op.matrix(), b, options, stats));
}

ScalarField torsion(const SchroedingerOperator& op, const SolveOptions& options, SolveStats* stats) {
  return minimize_energy(op, DiscreteMeasure::from_density(ScalarField::constant(op.grid(), 1.0)), options, stats);
}

GreenSolver::GreenSolver(const SchroedingerOperator& op) : op_(op), factor_(op.matrix()) {
  if (!factor_.positive_definite()) throw PreconditionError("Green columns need a positive definite operator");
}

ScalarField GreenSolver::column(std::size_t node) const {
  if (node >= op_.active().size() || !op_.is_active(node)) {
    throw PreconditionError("Green column requested at a hard or inactive node");
  }
  Vector e = Vector::Zero(static_cast<Eigen::Index>(op_.active_count()));
  e[op_.compact_index(node)] = 1.0;
  return op_.scatter(factor_.solve(e));
}

ScalarField GreenSolver::solve(const DiscreteMeasure& nu) const { return op_.scatter(factor_.solve(op_.load(nu))); }

ScalarField green_column(const SchroedingerOperator& op, std::size_t node) { return GreenSolver(op).column(node); }

double representation_check(const SchroedingerOperator& op, const ScalarField& u, const DiscreteMeasure& nu,
                            std::span<const std::size_t> nodes) {
  require_same_grid(u, op.potential());
  const GreenSolver green(op);
  const double scale = std::max(u.sup_abs(), std::numeric_limits<double>::min());
  double worst = 0.0;
  for (std::size_t x : nodes) {
    const ScalarField g = green.column(x);
    const double represented = pair_measure(*op.grid(), g, nu);
    worst = std::max(worst, std::abs(u[x] - represented) / scale);
  }
  return worst;
}

double reciprocity_check(const SchroedingerOperator& op, const ScalarField& f, const ScalarField& g,
                         const SolveOptions& options) {
  const Grid& grid = *op.grid();
  const ScalarField zeta_f = minimize_energy(op, DiscreteMeasure::from_density(f), options);
  const ScalarField zeta_g = minimize_energy(op, DiscreteMeasure::from_density(g), options);
  const double a = inner(grid, zeta_g, f);
  const double b = inner(grid, zeta_f, g);
  const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
  return std::abs(a - b) / scale;
}

namespace {

SparseMatrix shifted_matrix(const SparseMatrix& a, const Vector& b, double sigma) {
  SparseMatrix s = a;
  for (Eigen::Index k = 0; k < s.rows(); ++k) s.coeffRef(k, k) -= sigma * b[k];
  return s;
}

double rayleigh(const SparseMatrix& a, const Vector& b, const Vector& x) {
  return x.dot(a * x) / x.dot(b.cwiseProduct(x));
}

}  // namespace

SpectralResult rayleigh_lambda1(const SchroedingerOperator& op, const ScalarField* weight, const NodeMask* region,
                                const EigenOptions& options) {
  const SchroedingerOperator sub = region ? op.restricted(*region) : op;
  const Eigen::Index n = static_cast<Eigen::Index>(sub.active_count());
  if (n == 0) throw PreconditionError("rayleigh_lambda1 needs a nonempty region");
  Vector b = sub.mass();
  if (weight) {
    const Vector w = sub.gather(*weight);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(w[k] > 0.0)) throw PreconditionError("weight must be positive on the region");
    }
    b = b.cwiseProduct(w);
  }
  const SparseMatrix& a = sub.matrix();

  // Gershgorin lower bound for the pencil (A, B).
  double lo = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    double center = 0.0, radius = 0.0;
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.row() == k) center = it.value();
      else radius += std::abs(it.value());
    }
    lo = std::min(lo, (center - radius) / b[k]);
  }
  lo -= 1e-9 * std::max(1.0, std::abs(lo));

  Vector x = Vector::Ones(n);
  double hi = rayleigh(a, b, x);
  SpectralResult result;
  SpdFactorization factor(shifted_matrix(a, b, lo));
  ++result.factorizations;
  double factored_at = lo;
  while (!factor.positive_definite()) {
    lo -= std::max(1.0, std::abs(lo)) * 1e-6;
    factor.refactor(shifted_matrix(a, b, lo));
    ++result.factorizations;
    factored_at = lo;
  }

  const auto inverse_step = [&](const SpdFactorization& f) {
    x = f.solve(b.cwiseProduct(x));
    x /= std::sqrt(x.dot(b.cwiseProduct(x)));
  };

  // Bisection on definiteness of A - sigma B; each definite probe also
  // lowers the upper bound through a Rayleigh quotient.
  for (int step = 0; step < 200; ++step) {
    if (hi - lo <= options.bracket_tol * std::max(1.0, std::abs(hi))) break;
    const double sigma = 0.5 * (lo + hi);
    factor.refactor(shifted_matrix(a, b, sigma));
    ++result.factorizations;
    if (factor.positive_definite()) {
      lo = sigma;
      factored_at = sigma;
      for (int k = 0; k < 2; ++k) inverse_step(factor);
      hi = std::min(hi, rayleigh(a, b, x));
    } else {
      hi = sigma;
    }
  }
  if (factored_at != lo) {
    factor.refactor(shifted_matrix(a, b, lo));
    ++result.factorizations;
  }

  double lambda = rayleigh(a, b, x);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < options.max_inverse_iterations; ++it) {
    inverse_step(factor);
    ++result.iterations;
    const double next = rayleigh(a, b, x);
    const Vector ax = a * x;
    const Vector bx = b.cwiseProduct(x);
    residual = (ax - next * bx).norm() / (ax.norm() + std::abs(next) * bx.norm());
    const bool settled = std::abs(next - lambda) <= 1e-14 * std::max(1.0, std::abs(next));
    lambda = next;
    if (settled && residual <= options.residual_tol) break;
  }

  // Normalize to integral of xi^2 = 1 (unweighted), nonnegative mean.
  const Vector& m = sub.mass();
  x /= std::sqrt(x.dot(m.cwiseProduct(x)));
  if (x.dot(m) < 0.0) x = -x;
  result.lambda1 = lambda;
  result.residual = residual;
  result.eigenfield = sub.scatter(x);
  result.abs_eigenfield = sub.scatter(x.cwiseAbs());
  const double clip = std::max(op.potential().sup_abs(), 1.0);
  result.bounded_below = !(lambda <= -0.5 * clip && clip >= 1e11);
  if (lambda < 0.0) result.negative_energy_direction = result.eigenfield;
  return result;
}

GroundStateSides ground_state_identity(const SchroedingerOperator& op, const ScalarField& u, const ScalarField& xi) {
  require_same_grid(u, op.potential());
  require_same_grid(xi, op.potential());
  const Grid& grid = *op.grid();
  for (std::size_t node : op.active_nodes()) {
    if (xi[node] != 0.0 && !(u[node] > 0.0)) {
      throw PreconditionError("ground_state_identity requires u > 0 wherever xi != 0");
    }
  }
  GroundStateSides sides;
  const ScalarField au = op.apply(u);
  for (std::size_t node : op.active_nodes()) {
    if (xi[node] != 0.0) sides.potential_term += au[node] * xi[node] * xi[node] / u[node];
  }
  for (const Edge& e : grid.edges()) {
    if (!op.is_active(e.a) || !op.is_active(e.b)) continue;
    const double xa = xi[e.a], xb = xi[e.b], ua = u[e.a], ub = u[e.b];
    double term = 0.0;
    if (xa == 0.0 && xb == 0.0) term = 0.0;
    else if (xa == 0.0) term = ua * xb * xb / ub;
    else if (xb == 0.0) term = ub * xa * xa / ua;
    else {
      const double d = xa / ua - xb / ub;
      term = ua * ub * d * d;
    }
    sides.edge_term += e.weight() * term;
  }
  sides.lhs = op.energy(xi);
  sides.rhs = sides.potential_term + sides.edge_term;
  const double scale = std::max({std::abs(sides.lhs), std::abs(sides.rhs), std::numeric_limits<double>::min()});
  sides.relative_gap = std::abs(sides.lhs - sides.rhs) / scale;
  return sides;
}

double ground_state_bound(const SchroedingerOperator& op, const ScalarField& u, const ScalarField& f,
                          const ScalarField& xi) {
  const auto weights = op.grid()->quad_weights();
  double sum = 0.0;
  for (std::size_t node : op.active_nodes()) {
    if (xi[node] == 0.0) continue;
    if (!(u[node] > 0.0)) throw PreconditionError("ground_state_bound requires u > 0 wherever xi != 0");
    sum += weights[node] * f[node] * xi[node] * xi[node] / u[node];
  }
  return sum;
}

bool certify_witness(const SchroedingerOperator& op, const ScalarField& u, const ScalarField& mu, double tolerance) {
  const auto weights = op.grid()->quad_weights();
  const double mu_scale = std::max(mu.sup_abs(), std::numeric_limits<double>::min());
  for (std::size_t node : op.active_nodes()) {
    if (!(u[node] > 0.0)) return false;
    if (mu[node] < -tolerance * mu_scale) return false;
  }
  const ScalarField au = op.apply(u);
  double worst = 0.0, scale = 0.0;
  for (std::size_t node : op.active_nodes()) {
    worst = std::max(worst, std::abs(au[node] - weights[node] * mu[node]));
    scale = std::max(scale, std::abs(au[node]));
  }
  return worst <= tolerance * std::max(scale, std::numeric_limits<double>::min());
}

AapReport aap_check(const SchroedingerOperator& op, const EigenOptions& options) {
  const SpectralResult spectral = rayleigh_lambda1(op, options);
  AapReport report;
  report.lambda1 = spectral.lambda1;
  report.residual = spectral.residual;
  report.witness = spectral.abs_eigenfield;
  report.datum = spectral.abs_eigenfield;
  for (double& v : report.datum.values()) v *= spectral.lambda1;
  report.gap_nonnegative = spectral.lambda1 >= -1e-9 * std::max(1.0, std::abs(spectral.lambda1));
  report.witness_certified = certify_witness(op, report.witness, report.datum, 1e-7);
  report.agree = report.gap_nonnegative == report.witness_certified;
  return report;
}

}  // namespace torsionlab
