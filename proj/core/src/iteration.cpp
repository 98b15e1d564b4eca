#include "torsionlab/iteration.hpp"

#include <algorithm>
#include <cmath>

#include "torsionlab/error.hpp"

namespace torsionlab {

double QFunction::operator()(double t) const {
  if (!(t > 0.0)) return 0.0;
  return bound() * std::min(std::pow(t, alpha), 1.0);
}

ScalarField QFunction::apply(const ScalarField& u) const {
  ScalarField out = u;
  for (double& v : out.values()) v = (*this)(v);
  return out;
}

namespace {

double max_over(const Vector& v) { return v.size() == 0 ? 0.0 : v.maxCoeff(); }

Vector gather_density(const SchroedingerOperator& op, const DiscreteMeasure& mu) {
  return op.gather(mu.as_density());
}

double positive_mass(const DiscreteMeasure& mu) {
  const auto weights = mu.grid()->quad_weights();
  double mass = 0.0;
  for (std::size_t k = 0; k < mu.density.size(); ++k) mass += weights[k] * mu.density[k];
  for (const Atom& a : mu.atoms) mass += a.mass;
  return mass;
}

}  // namespace

IterationTrace monotone_scheme(const SplitPotential& potential, const DiscreteMeasure& mu,
                               const SchemeOptions& options) {
  if (!mu.nonnegative()) throw PreconditionError("monotone scheme needs a nonnegative datum");
  if (options.n_max == 0) throw PreconditionError("n_max must be positive");
  SchroedingerOperator op = SchroedingerOperator::positive_part(potential);
  if (options.region) op = op.restricted(*options.region);
  const SpdFactorization factor(op.matrix());
  if (!factor.positive_definite()) throw SolverError("V+ operator is not positive definite", 0.0);

  const Vector& mass = op.mass();
  const Vector f = gather_density(op, mu);
  const Vector vminus = op.gather(potential.vminus);
  const double f_max = max_over(f);
  const double v_max = max_over(vminus);
  double scale = options.truncation_scale;
  if (!(scale > 0.0)) scale = std::max({f_max, v_max, 1.0}) / std::max(1.0, std::floor(options.n_max / 4.0));
  std::optional<Vector> upper;
  double upper_scale = 0.0;
  if (options.upper_bound) {
    upper = op.gather(*options.upper_bound);
    upper_scale = std::max(upper->cwiseAbs().maxCoeff(), 1e-300);
  }

  const std::size_t n = op.active_count();
  Vector u = Vector::Zero(n);
  Vector u_prev = Vector::Zero(n);
  double level_prev = 0.0;
  IterationTrace trace;
  for (std::size_t step = 1; step <= options.n_max; ++step) {
    const double level = scale * static_cast<double>(step);
    // Right-hand side increment, written so that every term is nonnegative.
    Vector delta(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double tf = std::min(f[j], level) - std::min(f[j], level_prev);
      const double tv = std::min(vminus[j], level) - std::min(vminus[j], level_prev);
      delta[j] = mass[j] * (tf + tv * u[j] + std::min(vminus[j], level_prev) * (u[j] - u_prev[j]));
    }
    const Vector d = factor.solve(delta);
    u_prev = u;
    u += d;

    IterationRow row;
    row.n = step;
    row.level = level;
    row.sup_u = n == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
    row.increment = n == 0 ? 0.0 : d.cwiseAbs().maxCoeff();
    row.violation = n == 0 ? 0.0 : std::max(0.0, -d.minCoeff());
    row.monotone_ok = row.violation <= options.violation_budget * row.sup_u;
    trace.rows.push_back(row);
    if (!row.monotone_ok) {
      throw MonotonicityError("monotone scheme: iterate " + std::to_string(step) + " decreased", row.violation);
    }
    if (upper) {
      trace.upper_violation = std::max(trace.upper_violation, (u - *upper).maxCoeff() / upper_scale);
    }
    level_prev = level;

    const bool saturated = level >= f_max && level >= v_max;
    if (saturated && row.increment <= options.tol * row.sup_u) {
      trace.converged = true;
      break;
    }
    if (!(row.sup_u < 1e100)) {
      trace.diverged = true;
      break;
    }
  }
  trace.last = op.scatter(u);
  return trace;
}

double q_comparison_gap(const SchroedingerOperator& op_plus, const QFunction& q, const ScalarField& u) {
  const SpdFactorization factor(op_plus.matrix());
  const Vector z = factor.solve(op_plus.load(DiscreteMeasure::from_density(q.apply(u))));
  const Vector uc = op_plus.gather(u);
  const double scale = uc.size() == 0 ? 0.0 : uc.cwiseAbs().maxCoeff();
  if (scale == 0.0) return std::max(0.0, z.size() == 0 ? 0.0 : z.maxCoeff());
  return std::max(0.0, (z - uc).maxCoeff()) / scale;
}

Calibration calibrate_Q(const SplitPotential& potential, const CalibrationOptions& options) {
  if (!(options.alpha > 1.0)) throw PreconditionError("Q alpha must exceed 1");
  const SchroedingerOperator op = SchroedingerOperator::positive_part(potential);
  const SpdFactorization factor(op.matrix());
  const GridPtr& grid = op.grid();

  Calibration result;
  result.probes.push_back(op.scatter(factor.solve(op.load(DiscreteMeasure::from_density(ScalarField::constant(grid, 1.0))))));
  for (std::size_t p = 0; p < options.probe_count; ++p) {
    const ScalarField density = uniform_random_field(grid, options.seed + p);
    result.probes.push_back(op.scatter(factor.solve(op.load(DiscreteMeasure::from_density(density)))));
  }

  const auto worst = [&](const QFunction& q) {
    double gap = 0.0;
    for (const ScalarField& u : result.probes) {
      const Vector z = factor.solve(op.load(DiscreteMeasure::from_density(q.apply(u))));
      const Vector uc = op.gather(u);
      const double scale = std::max(uc.cwiseAbs().maxCoeff(), 1e-300);
      gap = std::max(gap, std::max(0.0, (z - uc).maxCoeff()) / scale);
    }
    return gap;
  };
  const auto q_at = [&](int e) { return QFunction{options.alpha, std::ldexp(1.0, e)}; };
  const auto ok = [&](int e) { return worst(q_at(e)) <= options.tol; };

  int lo = -64, hi = 64;
  if (!ok(hi)) throw PreconditionError("Q calibration failed: no C <= 2^64 satisfies the comparison (degenerate grid)");
  if (ok(lo)) {
    hi = lo;
  } else {
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      if (ok(mid)) hi = mid;
      else lo = mid;
    }
  }
  result.exponent = hi;
  result.q = q_at(hi);
  result.worst_gap = worst(result.q);
  return result;
}

ScalarField supersolution_weight(const ScalarField& qz, const ScalarField& u, const NodeMask& mask, double w_cap,
                                 double eps_rel) {
  require_same_grid(qz, u);
  const double eps = eps_rel * u.sup_abs();
  ScalarField weight(u.grid());
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (!mask[k]) continue;
    const double denom = std::max(u[k], eps);
    weight[k] = denom > 0.0 ? std::min(qz[k] / denom, w_cap) : w_cap;
  }
  return weight;
}

WeightResult build_weight(const SplitPotential& potential, const DiscreteMeasure& mu,
                          const DecompositionResult& decomposition, int i, const QFunction& q,
                          const WeightOptions& options) {
  const NodeMask mask = decomposition.component_mask(i);
  const DiscreteMeasure mu_i = restrict_measure(mu, mask);
  if (!mu_i.nonnegative()) throw PreconditionError("weight construction needs a nonnegative datum");
  if (!(positive_mass(mu_i) > 0.0)) throw PreconditionError("weight construction needs mu(D_i) > 0");

  WeightResult result;
  result.component = i;
  result.q = q;
  const GreenSolver plus(SchroedingerOperator::positive_part(potential));
  result.z = plus.solve(mu_i);
  const ScalarField qz = q.apply(result.z);
  const DiscreteMeasure datum = DiscreteMeasure::from_density(qz);
  result.trace = monotone_scheme(potential, datum, options.scheme);

  // The scheme limit is the solution of the signed system whenever that system is positive definite.
  const SchroedingerOperator full = SchroedingerOperator::full(potential);
  const SpdFactorization factor(full.matrix());
  if (factor.positive_definite()) {
    result.u_tilde = full.scatter(factor.solve(full.load(datum)));
    result.polished = true;
  } else {
    result.u_tilde = result.trace.last;
  }
  const double sup_u = result.u_tilde.sup_abs();
  if (sup_u > 0.0) {
    double gap = 0.0;
    for (std::size_t k = 0; k < result.u_tilde.size(); ++k) {
      gap = std::max(gap, std::abs(result.trace.last[k] - result.u_tilde[k]));
    }
    result.scheme_gap = gap / sup_u;
  }

  result.weight = supersolution_weight(qz, result.u_tilde, mask, options.w_cap, options.eps_rel);

  const SpectralResult spectral = rayleigh_lambda1(full, &result.weight, &mask, options.eigen);
  result.certified_lambda = spectral.lambda1;
  result.certified = spectral.lambda1 >= 1.0 - options.certify_tol;
  if (!result.certified) result.certificate = spectral.eigenfield;
  return result;
}

ScalarField minimize_theta(const SplitPotential& potential, const DecompositionResult& decomposition, int i,
                           const ScalarField& weight, const ScalarField& h_datum) {
  require_same_grid(weight, h_datum);
  const NodeMask mask = decomposition.component_mask(i);
  const SchroedingerOperator op = SchroedingerOperator::full(potential).restricted(mask);
  const SpdFactorization factor(op.matrix());
  if (!factor.positive_definite()) {
    throw PreconditionError("indefinite restricted operator: the weighted Poincare inequality is not certified");
  }
  ScalarField rhs(weight.grid());
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = weight[k] * h_datum[k];
  return op.scatter(factor.solve(op.load(DiscreteMeasure::from_density(rhs))));
}

RigidityVerdict supersolution_rigidity_check(const SplitPotential& potential, const ScalarField& weight,
                                             const DecompositionResult& decomposition, int i, const ScalarField& u,
                                             double certify_tol) {
  const NodeMask mask = decomposition.component_mask(i);
  RigidityVerdict verdict;
  verdict.scale = u.sup_abs();
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) verdict.max_on_component = std::max(verdict.max_on_component, std::abs(u[k]));
  }
  verdict.vanishes = verdict.max_on_component <= 1e-8 * verdict.scale;
  const SpectralResult spectral =
      rayleigh_lambda1(SchroedingerOperator::full(potential), &weight, &mask, EigenOptions{});
  verdict.certified_lambda = spectral.lambda1;
  verdict.poincare_certified = spectral.lambda1 >= 1.0 - certify_tol;
  return verdict;
}

}  // namespace torsionlab
