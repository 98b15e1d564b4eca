#include "torsionlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "torsionlab/error.hpp"
#include "torsionlab/field.hpp"
#include "torsionlab/integrals.hpp"
#include "torsionlab/potential.hpp"

namespace torsionlab::oracle {

void HardyFamily::validate() const {
  if (n < 3) throw PreconditionError("Hardy family needs N >= 3");
  if (!(alpha > 0.0 && alpha < n - 2)) throw PreconditionError("Hardy family needs 0 < alpha < N - 2");
  if (!(beta >= 0.5 * (n - 2) && beta <= alpha)) throw PreconditionError("Hardy family needs (N - 2) / 2 <= beta <= alpha");
}

double u_alpha(double r, double alpha) {
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  if (!(r > 0.0 && r <= 1.0)) throw PreconditionError("u_alpha needs 0 < r <= 1");
  return std::pow(r, -alpha) - 1.0;
}

double v_alpha(double r, int n, double alpha) {
  if (!(r > 0.0 && r < 1.0)) throw PreconditionError("V_alpha needs 0 < r < 1");
  return -alpha * (n - 2 - alpha) / (r * r * (1.0 - std::pow(r, alpha)));
}

double f_alpha_beta(double r, const HardyFamily& family) {
  family.validate();
  if (!(r > 0.0 && r < 1.0)) throw PreconditionError("f_alpha_beta needs 0 < r < 1");
  const double a = family.alpha, b = family.beta, m = family.n - 2;
  const double ra = std::pow(r, a), rb = std::pow(r, b);
  return (b * (m - b) * (1.0 - ra) - a * (m - a) * (1.0 - rb)) / (std::pow(r, b + 2.0) * (1.0 - ra));
}

double f_alpha_beta_lower_bound(double r, const HardyFamily& family) {
  family.validate();
  if (!(r > 0.0 && r < 1.0)) throw PreconditionError("f_alpha_beta needs 0 < r < 1");
  const double a = family.alpha, b = family.beta, m = family.n - 2;
  const double ra = std::pow(r, a), rb = std::pow(r, b);
  return a * (m - a) * (rb - ra) / (std::pow(r, b + 2.0) * (1.0 - ra));
}

double radial_residual(const HardyFamily& family, double h, const std::function<double(double)>& u, double r_lo,
                       double r_hi) {
  family.validate();
  const GridPtr grid = Grid::build(DomainSpec::radial_ball(family.n, 1.0), h);
  std::size_t inside = 0;
  for (const Node& node : grid->nodes()) inside += (node.x >= r_lo && node.x <= r_hi) ? 1 : 0;
  if (inside < 100) throw PreconditionError("radial_residual needs at least 100 nodes in the check window");
  const ScalarField field = ScalarField::from_nodes(grid, [&](const Node& node) { return u(node.x); });
  const ScalarField lap = apply_laplacian(*grid, field);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid->size(); ++k) {
    const double r = grid->nodes()[k].x;
    if (r < r_lo || r > r_hi) continue;
    const double residual = lap[k] + v_alpha(r, family.n, family.alpha) * field[k] - f_alpha_beta(r, family);
    worst = std::max(worst, std::abs(residual));
  }
  return worst;
}

double radial_residual(const HardyFamily& family, double h, double r_lo, double r_hi) {
  return radial_residual(family, h, [&](double r) { return u_alpha(r, family.beta); }, r_lo, r_hi);
}

double torsion_ball(double r, int n, double radius) {
  if (n < 1 || !(radius > 0.0)) throw PreconditionError("torsion_ball needs N >= 1 and R > 0");
  if (!(r >= 0.0 && r <= radius)) throw PreconditionError("torsion_ball needs 0 <= r <= R");
  return (radius * radius - r * r) / (2.0 * n);
}

double torsion_rectangle(const Rectangle& rect, double x, double y, int terms) {
  const double a = rect.x1 - rect.x0, b = rect.y1 - rect.y0;
  if (!(a > 0.0 && b > 0.0)) throw PreconditionError("torsion_rectangle needs a nondegenerate rectangle");
  const double s = x - rect.x0, t = y - rect.y0;
  if (!(s >= 0.0 && s <= a && t >= 0.0 && t <= b)) throw PreconditionError("point outside the rectangle");
  constexpr double pi = std::numbers::pi;
  double value = 0.5 * s * (a - s);
  for (int k = 0; k < terms; ++k) {
    const double n = 2.0 * k + 1.0;
    const double q = n * pi / a;
    // cosh(q (t - b/2)) / cosh(q b/2) written with exponentials that cannot overflow.
    const double ratio = (std::exp(q * (std::abs(t - 0.5 * b) - 0.5 * b)) + std::exp(-q * (std::abs(t - 0.5 * b) + 0.5 * b))) /
                         (1.0 + std::exp(-q * b));
    value -= 4.0 * a * a / (pi * pi * pi * n * n * n) * std::sin(q * s) * ratio;
  }
  return value;
}

double torsion_exact(const DomainSpec& domain, Point p, int terms) {
  if (domain.inner_region) throw PreconditionError("torsion_exact: unsupported domain (inner region)");
  if (const auto* ball = std::get_if<RadialBall>(&domain.shape)) {
    return torsion_ball(p.x, ball->dimension, ball->radius);
  }
  if (const auto* disk = std::get_if<Disk>(&domain.shape)) {
    return torsion_ball(std::hypot(p.x - disk->center.x, p.y - disk->center.y), 2, disk->radius);
  }
  return torsion_rectangle(std::get<Rectangle>(domain.shape), p.x, p.y, terms);
}

std::vector<TruncationRow> truncation_energy_scan(int n, double alpha, const std::vector<double>& ks, double h) {
  const GridPtr grid = Grid::build(DomainSpec::radial_ball(n, 1.0), h);
  const ScalarField v = evaluate(PotentialSpec{HardySigned{alpha}}, grid).signed_values();
  const auto weights = grid->quad_weights();
  std::vector<TruncationRow> rows;
  for (double k : ks) {
    if (!(k > 0.0)) throw PreconditionError("truncation levels must be positive");
    const ScalarField t = ScalarField::from_nodes(grid, [&](const Node& node) { return std::min(u_alpha(node.x, alpha), k); });
    TruncationRow row;
    row.k = k;
    row.dirichlet = gradient_energy(*grid, t);
    for (std::size_t j = 0; j < grid->size(); ++j) row.potential += weights[j] * v[j] * t[j] * t[j];
    row.energy = row.dirichlet + row.potential;
    rows.push_back(row);
  }
  return rows;
}

SlabProfile slab_defect_1d(double alpha, double h) {
  const double cells = std::round(1.0 / h);
  if (!(h > 0.0) || std::abs(cells * h - 1.0) > 1e-9 || cells < 4) {
    throw PreconditionError("slab_defect_1d needs 1/h to be an integer >= 4");
  }
  const std::size_t m = static_cast<std::size_t>(cells) - 1;
  // Thomas algorithm on -u_{j-1} + (2 + h^2 V_j) u_j - u_{j+1} = h^2.
  std::vector<double> diag(m), rhs(m, h * h), c(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = (j + 1) * h;
    diag[j] = 2.0 + h * h * inverse_power_cell_mean(t - 0.5 * h, t + 0.5 * h, alpha);
  }
  c[0] = -1.0 / diag[0];
  rhs[0] /= diag[0];
  for (std::size_t j = 1; j < m; ++j) {
    const double denom = diag[j] + c[j - 1];
    c[j] = -1.0 / denom;
    rhs[j] = (rhs[j] + rhs[j - 1]) / denom;
  }
  for (std::size_t j = m - 1; j-- > 0;) rhs[j] -= c[j] * rhs[j + 1];
  SlabProfile profile;
  profile.h = h;
  profile.density = 2.0 * rhs[0] / h;
  profile.u = std::move(rhs);
  return profile;
}

}  // namespace torsionlab::oracle
