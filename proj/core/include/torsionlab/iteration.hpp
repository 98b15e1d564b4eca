#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "torsionlab/decomposition.hpp"
#include "torsionlab/error.hpp"
#include "torsionlab/field.hpp"
#include "torsionlab/operator.hpp"
#include "torsionlab/potential.hpp"
#include "torsionlab/variational.hpp"

namespace torsionlab {

/// Q(t) = ((alpha - 1) / (C alpha)) min(t^alpha, 1).
struct QFunction {
  double alpha = 2.0;
  double c = 1.0;

  double operator()(double t) const;
  double bound() const { return (alpha - 1.0) / (c * alpha); }
  ScalarField apply(const ScalarField& u) const;
};

/// Thrown when an iterate decreases by more than the violation budget.
class MonotonicityError : public SolverError {
 public:
  MonotonicityError(const std::string& what, double violation) : SolverError(what, violation) {}
};

struct IterationRow {
  std::size_t n = 0;
  double level = 0.0;
  double sup_u = 0.0;
  double increment = 0.0;
  /// Most negative nodewise increment (0 when none).
  double violation = 0.0;
  bool monotone_ok = true;
};

struct IterationTrace {
  std::vector<IterationRow> rows;
  ScalarField last;
  bool converged = false;
  bool diverged = false;
  /// Largest violation of u_n <= upper_bound over the run, relative to sup of the bound.
  double upper_violation = 0.0;
};

struct SchemeOptions {
  std::size_t n_max = 200;
  double tol = 1e-8;
  /// Truncation level k_n = truncation_scale * n. A value <= 0 picks the scale
  /// that saturates both truncations at n = n_max / 4.
  double truncation_scale = 1.0;
  double violation_budget = 1e-12;
  /// Optional supersolution checked against every iterate.
  std::optional<ScalarField> upper_bound;
  /// Restricts the scheme to a set of nodes (the rest pinned to zero).
  std::optional<NodeMask> region;
};

/// u_0 = 0 and (-Laplace + V+) u_n = T_{k_n}(mu) + T_{k_n}(V-) u_{n-1}, with atoms
/// spread into densities. Stops on a relative sup-increment below tol once the
/// truncations saturate, or at n_max. Throws MonotonicityError when an iterate
/// decreases beyond budget.
IterationTrace monotone_scheme(const SplitPotential& potential, const DiscreteMeasure& mu,
                               const SchemeOptions& options = {});

struct CalibrationOptions {
  double alpha = 2.0;
  /// Random-density probes added to zeta1.
  std::size_t probe_count = 3;
  std::uint64_t seed = 42;
  double tol = 1e-8;
};

struct Calibration {
  QFunction q;
  int exponent = 0;
  std::vector<ScalarField> probes;
  /// Worst relative violation of u >= zeta_{Q(u)} over the probes.
  double worst_gap = 0.0;
};

/// Smallest C = 2^e, e in [-64, 64], with u >= zeta_{Q(u)} on every probe.
/// Throws PreconditionError when no such C exists.
Calibration calibrate_Q(const SplitPotential& potential, const CalibrationOptions& options = {});

/// Checks u >= zeta_{Q(u)} nodewise; returns the worst violation relative to sup u.
double q_comparison_gap(const SchroedingerOperator& op_plus, const QFunction& q, const ScalarField& u);

/// min(Q(z) / max(u, eps_rel * sup u), w_cap) on the mask, 0 elsewhere.
ScalarField supersolution_weight(const ScalarField& qz, const ScalarField& u, const NodeMask& mask, double w_cap = 1e6,
                                 double eps_rel = 1e-12);

struct WeightOptions {
  double w_cap = 1e6;
  double eps_rel = 1e-12;
  double certify_tol = 1e-6;
  SchemeOptions scheme;
  EigenOptions eigen;
};

struct WeightResult {
  int component = 0;
  QFunction q;
  ScalarField z;
  ScalarField u_tilde;
  ScalarField weight;
  double certified_lambda = 0.0;
  bool certified = false;
  /// True when u_tilde came from a direct solve of the signed system.
  bool polished = false;
  /// sup |u_N - u_tilde| / sup u_tilde for the last scheme iterate.
  double scheme_gap = 0.0;
  IterationTrace trace;
  /// Field with negative form energy when certification fails.
  std::optional<ScalarField> certificate;
};

/// Weight on D_i: z = (A+)^{-1} mu|D_i, u_tilde the scheme limit with datum
/// Q(z), w = min(Q(z) / max(u_tilde, eps), w_cap) on D_i, certified by the
/// weighted Rayleigh quotient.
WeightResult build_weight(const SplitPotential& potential, const DiscreteMeasure& mu,
                          const DecompositionResult& decomposition, int i, const QFunction& q,
                          const WeightOptions& options = {});

/// Solves the signed system restricted to D_i with datum w * h_datum; zero
/// outside D_i. Throws PreconditionError when the restricted operator is indefinite.
ScalarField minimize_theta(const SplitPotential& potential, const DecompositionResult& decomposition, int i,
                           const ScalarField& weight, const ScalarField& h_datum);

struct RigidityVerdict {
  bool vanishes = false;
  double max_on_component = 0.0;
  double scale = 0.0;
  double certified_lambda = 0.0;
  bool poincare_certified = false;
};

/// u must vanish on D_i (relative to sup |u|) when its datum lives off D_i.
RigidityVerdict supersolution_rigidity_check(const SplitPotential& potential, const ScalarField& weight,
                                             const DecompositionResult& decomposition, int i, const ScalarField& u,
                                             double certify_tol = 1e-6);

}  // namespace torsionlab
