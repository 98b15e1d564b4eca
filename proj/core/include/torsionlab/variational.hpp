#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "torsionlab/field.hpp"
#include "torsionlab/operator.hpp"

namespace torsionlab {

/// Minimizer of 1/2 (xi^T A xi) - <f, xi>: solves A zeta = load(f). The
/// operator must be positive definite (V+ only). Inactive nodes report 0.
ScalarField minimize_energy(const SchroedingerOperator& op, const DiscreteMeasure& f, const SolveOptions& options = {},
                            SolveStats* stats = nullptr);

/// minimize_energy with datum f = 1.
ScalarField torsion(const SchroedingerOperator& op, const SolveOptions& options = {}, SolveStats* stats = nullptr);

/// Factors the operator once and serves Green columns A G_x = e_x.
class GreenSolver {
 public:
  explicit GreenSolver(const SchroedingerOperator& op);
  /// Throws PreconditionError when x is inactive.
  ScalarField column(std::size_t node) const;
  /// Solve for a general measure with the stored factorization.
  ScalarField solve(const DiscreteMeasure& nu) const;
  const SchroedingerOperator& op() const noexcept { return op_; }

 private:
  SchroedingerOperator op_;
  SpdFactorization factor_;
};

ScalarField green_column(const SchroedingerOperator& op, std::size_t node);

/// Worst relative gap |u(x) - <G_x, nu>| / sup|u| over the sample nodes.
double representation_check(const SchroedingerOperator& op, const ScalarField& u, const DiscreteMeasure& nu,
                            std::span<const std::size_t> nodes);

/// Relative gap between the integral of zeta_g f and of zeta_f g.
double reciprocity_check(const SchroedingerOperator& op, const ScalarField& f, const ScalarField& g,
                         const SolveOptions& options = {});

struct SpectralResult {
  double lambda1 = 0.0;
  /// Normalized to integral of xi^2 = 1, sign chosen so the mean is nonnegative.
  ScalarField eigenfield;
  /// |eigenfield|, the nonnegative minimizer.
  ScalarField abs_eigenfield;
  std::size_t iterations = 0;
  std::size_t factorizations = 0;
  double residual = 0.0;
  /// False when lambda1 sits at the clip scale: the spectrum is unbounded below.
  bool bounded_below = true;
  /// Direction of negative energy (the eigenfield) when lambda1 < 0.
  std::optional<ScalarField> negative_energy_direction;
};

struct EigenOptions {
  /// Bracket width relative to max(1, |lambda|).
  double bracket_tol = 1e-6;
  double residual_tol = 1e-9;
  std::size_t max_inverse_iterations = 200;
};

/// Smallest value of xi^T A xi / sum m_j w_j xi_j^2 over fields supported in
/// the region. The shift is located by bisection on positive definiteness of
/// A - sigma B, refined by shifted inverse iteration.
SpectralResult rayleigh_lambda1(const SchroedingerOperator& op, const ScalarField* weight, const NodeMask* region,
                                const EigenOptions& options = {});
inline SpectralResult rayleigh_lambda1(const SchroedingerOperator& op, const EigenOptions& options = {}) {
  return rayleigh_lambda1(op, nullptr, nullptr, options);
}

struct GroundStateSides {
  double lhs = 0.0;
  double rhs = 0.0;
  /// sum_j (A u)_j xi_j^2 / u_j.
  double potential_term = 0.0;
  /// sum over edges of w u_a u_b (xi_a / u_a - xi_b / u_b)^2.
  double edge_term = 0.0;
  double relative_gap = 0.0;
};

/// Discrete ground-state transform: xi^T A xi = sum (Au)_j xi_j^2 / u_j + edge term.
/// Throws PreconditionError when u <= 0 at an active node where xi != 0.
GroundStateSides ground_state_identity(const SchroedingerOperator& op, const ScalarField& u, const ScalarField& xi);

/// Lower bound sum_j m_j f_j xi_j^2 / u_j of xi^T A xi valid when A u = M f and u > 0.
double ground_state_bound(const SchroedingerOperator& op, const ScalarField& u, const ScalarField& f,
                          const ScalarField& xi);

struct AapReport {
  double lambda1 = 0.0;
  ScalarField witness;  // u
  ScalarField datum;    // mu = lambda1 u
  bool gap_nonnegative = false;
  bool witness_certified = false;
  bool agree = false;
  double residual = 0.0;
};

/// Certifies nonnegativity of the form from a stored supersolution witness:
/// u > 0 on every active node, mu >= 0, and A u = M mu up to tolerance.
bool certify_witness(const SchroedingerOperator& op, const ScalarField& u, const ScalarField& mu,
                     double tolerance = 1e-8);

/// Both directions of the supersolution / nonnegative-form equivalence.
AapReport aap_check(const SchroedingerOperator& op, const EigenOptions& options = {});

}  // namespace torsionlab
