#pragma once

#include <functional>
#include <vector>

#include "torsionlab/grid.hpp"

namespace torsionlab::oracle {

/// Parameters of u_beta with V_alpha: N >= 3, 0 < alpha < N - 2, (N - 2) / 2 <= beta <= alpha.
struct HardyFamily {
  int n = 5;
  double alpha = 2.5;
  double beta = 1.5;
  void validate() const;
};

/// r^{-alpha} - 1; +infinity at r = 0.
double u_alpha(double r, double alpha);
/// -alpha (N - 2 - alpha) / (r^2 (1 - r^alpha)) for 0 < r < 1.
double v_alpha(double r, int n, double alpha);
/// Datum of -Laplace u_beta + V_alpha u_beta.
double f_alpha_beta(double r, const HardyFamily& family);
/// alpha (N - 2 - alpha) (r^beta - r^alpha) / (r^{beta + 2} (1 - r^alpha)).
double f_alpha_beta_lower_bound(double r, const HardyFamily& family);

/// max |(-Laplace_h + V_alpha) u - f| over radial nodes in [r_lo, r_hi],
/// with the conservative radial stencil of the grid module.
double radial_residual(const HardyFamily& family, double h, const std::function<double(double)>& u,
                       double r_lo = 0.1, double r_hi = 0.9);
/// The same with u = u_beta.
double radial_residual(const HardyFamily& family, double h, double r_lo = 0.1, double r_hi = 0.9);

/// (R^2 - r^2) / (2N).
double torsion_ball(double r, int n, double radius);
/// Torsion of [x0, x1] x [y0, y1] from the separable series with `terms` odd modes.
double torsion_rectangle(const Rectangle& rect, double x, double y, int terms = 50);
/// Closed-form torsion of V = 0 at a point (x is the radius on radial balls).
/// Throws PreconditionError for unsupported domains.
double torsion_exact(const DomainSpec& domain, Point p, int terms = 50);

struct TruncationRow {
  double k = 0.0;
  double dirichlet = 0.0;
  double potential = 0.0;
  double energy = 0.0;
};

/// Energy of T_k(u_alpha) with V_alpha on the radial unit ball.
std::vector<TruncationRow> truncation_energy_scan(int n, double alpha, const std::vector<double>& ks, double h);

struct SlabProfile {
  double h = 0.0;
  /// 2 u(h) / h: the two one-sided quotients at t = 0.
  double density = 0.0;
  std::vector<double> u;
};

/// -u'' + u / |t|^alpha = 1 on (0, 1), u(0) = u(1) = 0, with exact cell
/// averages of the potential and a tridiagonal solve.
SlabProfile slab_defect_1d(double alpha, double h);

}  // namespace torsionlab::oracle
