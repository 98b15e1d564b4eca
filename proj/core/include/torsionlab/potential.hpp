#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "torsionlab/field.hpp"
#include "torsionlab/grid.hpp"

namespace torsionlab {

/// kappa / |x - a|^2.
struct HardyPoint {
  Point a;
  double kappa = 1.0;
};
/// 1 / |x_1|^alpha.
struct InversePowerAxis {
  double alpha = 1.5;
};
/// 1 / d(x, boundary of omega)^2.
struct DistBoundarySq {
  Disk omega;
};
/// 1 / d(x, omega)^2, infinite on the closed disk.
struct DistSetSq {
  Disk omega;
};
/// -alpha (N - 2 - alpha) / (r^2 (1 - r^alpha)) on the unit ball; radial grids only.
struct HardySigned {
  double alpha = 0.5;
};
/// (1 / (4 d^2)) (chi outside omega - chi omega), d the distance to the boundary of omega.
struct BrezisMarcus {
  Disk omega;
};
/// 1 / |x|^beta.
struct InversePowerRadial {
  double beta = 1.0;
};
struct ConstantPotential {
  double value = 0.0;
};

struct PotentialSpec;
struct PotentialSum {
  std::vector<PotentialSpec> terms;
};

struct PotentialSpec {
  std::variant<HardyPoint, InversePowerAxis, DistBoundarySq, DistSetSq, HardySigned, BrezisMarcus,
               InversePowerRadial, ConstantPotential, PotentialSum>
      kind;

  static PotentialSpec constant(double c) { return {ConstantPotential{c}}; }
  static PotentialSpec sum(PotentialSpec a, PotentialSpec b) { return {PotentialSum{{std::move(a), std::move(b)}}}; }
  std::string name() const;
};

/// Exact mean of |t|^{-alpha} over [lo, hi]; +infinity when the interval
/// touches 0 and alpha >= 1.
double inverse_power_cell_mean(double lo, double hi, double alpha);

/// Throws ConstructionError when parameters are out of range or the variant
/// cannot live on a grid of this mode.
void validate(const PotentialSpec& spec, const Grid& grid);

/// Pointwise value at a planar point (or at radius p.x on radial grids); may be +-infinity.
double point_value(const PotentialSpec& spec, const Grid& grid, Point p);

/// Cell average over the node's sampling cell; +-infinity when the average diverges.
double cell_average(const PotentialSpec& spec, const Grid& grid, std::size_t node, int subsamples);

struct EvaluateOptions {
  int subsamples = 3;
  double clip = 1e12;
};

struct SplitPotential {
  ScalarField vplus;
  ScalarField vminus;
  /// Nodes whose cell average of V+ reached the clip.
  NodeMask hard_mask;
  double clip = 1e12;

  ScalarField signed_values() const;
  ScalarField abs_values() const;
  std::size_t hard_count() const;
};

SplitPotential evaluate(const PotentialSpec& spec, const GridPtr& grid, const EvaluateOptions& options = {});

/// min(f, n) nodewise for f >= 0.
ScalarField truncate_plus(const ScalarField& f, double n);
/// T_k(s) = min(max(s, -k), k) nodewise.
ScalarField truncate_signed(const ScalarField& f, double k);

/// Kato modulus eta(delta) = sup_x integral over B_delta(x) of |V(y)| K(x - y) dy, with
/// K = |z|^{2-N} (radial grids, N = 3) or log(2 delta / |z|) (planar grids, N = 2).
/// Throws PreconditionError("unresolved radius") when delta < h.
double kato_eta(const PotentialSpec& spec, const GridPtr& grid, double delta, int dimension,
                const EvaluateOptions& options = {});
double kato_eta(const SplitPotential& potential, double delta, int dimension, int subsamples = 3);

struct KatoRow {
  double delta = 0.0;
  double eta = 0.0;
};

struct KatoReport {
  std::vector<KatoRow> rows;
  double fraction = 0.2;
  bool vanishing = false;
};

/// Sweeps a decreasing delta sequence (every delta >= 2h). The verdict is
/// "vanishing" when the last eta is below fraction * first eta.
KatoReport kato_report(const PotentialSpec& spec, const GridPtr& grid, const std::vector<double>& deltas,
                       int dimension, double fraction = 0.2, const EvaluateOptions& options = {});

}  // namespace torsionlab
