#include "torsionlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "torsionlab/error.hpp"

namespace torsionlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Distance from p to the closed square, 0 inside.
double distance_to_cell(Point p, const Cell& c) {
  const double dx = std::max({c.x_lo - p.x, 0.0, p.x - c.x_hi});
  const double dy = std::max({c.y_lo - p.y, 0.0, p.y - c.y_hi});
  return std::hypot(dx, dy);
}

double farthest_corner(Point p, const Cell& c) {
  const double dx = std::max(std::abs(c.x_lo - p.x), std::abs(c.x_hi - p.x));
  const double dy = std::max(std::abs(c.y_lo - p.y), std::abs(c.y_hi - p.y));
  return std::hypot(dx, dy);
}

bool cell_meets_circle(const Cell& c, const Disk& d) {
  return distance_to_cell(d.center, c) <= d.radius && d.radius <= farthest_corner(d.center, c);
}

bool cell_meets_disk(const Cell& c, const Disk& d) { return distance_to_cell(d.center, c) <= d.radius; }

bool cell_contains(const Cell& c, Point p) {
  return c.x_lo <= p.x && p.x <= c.x_hi && c.y_lo <= p.y && p.y <= c.y_hi;
}

// Mean of |t|^{-alpha} over [lo, hi]; +inf when the interval touches 0 and alpha >= 1.
double mean_inverse_power_1d(double lo, double hi, double alpha) {
  if (alpha == 0.0) return 1.0;
  const auto antiderivative = [alpha](double t) {
    // Odd extension of the integral of |t|^{-alpha} from 0.
    const double a = std::abs(t);
    const double value = std::abs(alpha - 1.0) < 1e-14 ? std::log(a) : std::pow(a, 1.0 - alpha) / (1.0 - alpha);
    return t < 0.0 ? -value : value;
  };
  if (lo <= 0.0 && hi >= 0.0) {
    if (alpha >= 1.0) return kInf;
    return (std::pow(-lo, 1.0 - alpha) + std::pow(hi, 1.0 - alpha)) / (1.0 - alpha) / (hi - lo);
  }
  if (hi < 0.0) return mean_inverse_power_1d(-hi, -lo, alpha);
  if (std::abs(alpha - 1.0) < 1e-14) return (std::log(hi) - std::log(lo)) / (hi - lo);
  return (antiderivative(hi) - antiderivative(lo)) / (hi - lo);
}

}  // namespace

double inverse_power_cell_mean(double lo, double hi, double alpha) { return mean_inverse_power_1d(lo, hi, alpha); }

namespace {

const Disk& require_disk(const Disk& d) {
  if (!(d.radius > 0.0)) throw ConstructionError("potential omega radius must be positive");
  return d;
}

struct CellSampler {
  const Grid& grid;
  int m;

  // Mean of f over the cell's subsample points. Planar: m x m midpoints;
  // radial: m midpoints weighted by r^{N-1}.
  template <class F>
  double mean(const Cell& c, F&& f) const {
    if (grid.mode() == GridMode::radial) {
      const double width = (c.x_hi - c.x_lo) / m;
      double num = 0.0, den = 0.0;
      for (int k = 0; k < m; ++k) {
        const double r = c.x_lo + (k + 0.5) * width;
        const double w = std::pow(r, grid.dimension() - 1);
        num += w * f(Point{r, 0.0});
        den += w;
      }
      return num / den;
    }
    const double wx = (c.x_hi - c.x_lo) / m;
    const double wy = (c.y_hi - c.y_lo) / m;
    double sum = 0.0;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) sum += f(Point{c.x_lo + (a + 0.5) * wx, c.y_lo + (b + 0.5) * wy});
    }
    return sum / (static_cast<double>(m) * m);
  }
};

bool radial(const Grid& grid) { return grid.mode() == GridMode::radial; }

void require_planar(const Grid& grid, const char* name) {
  if (radial(grid)) throw ConstructionError(std::string(name) + " requires a planar grid (spec/grid mode mismatch)");
}

}  // namespace

std::string PotentialSpec::name() const {
  return std::visit(Overloaded{[](const HardyPoint&) { return std::string("hardy_point"); },
                               [](const InversePowerAxis&) { return std::string("inverse_power_axis"); },
                               [](const DistBoundarySq&) { return std::string("dist_boundary_sq"); },
                               [](const DistSetSq&) { return std::string("dist_set_sq"); },
                               [](const HardySigned&) { return std::string("hardy_signed"); },
                               [](const BrezisMarcus&) { return std::string("brezis_marcus"); },
                               [](const InversePowerRadial&) { return std::string("inverse_power_radial"); },
                               [](const ConstantPotential&) { return std::string("constant"); },
                               [](const PotentialSum&) { return std::string("sum"); }},
                    kind);
}

void validate(const PotentialSpec& spec, const Grid& grid) {
  std::visit(Overloaded{
                 [&](const HardyPoint& v) {
                   if (!(v.kappa >= 0.0)) throw ConstructionError("hardy_point requires kappa >= 0");
                   if (radial(grid) && (v.a.x != 0.0 || v.a.y != 0.0)) {
                     throw ConstructionError("hardy_point on a radial grid must sit at the origin");
                   }
                 },
                 [&](const InversePowerAxis& v) {
                   if (!(v.alpha >= 0.0)) throw ConstructionError("inverse_power_axis requires alpha >= 0");
                   require_planar(grid, "inverse_power_axis");
                 },
                 [&](const DistBoundarySq& v) {
                   require_disk(v.omega);
                   require_planar(grid, "dist_boundary_sq");
                 },
                 [&](const DistSetSq& v) {
                   require_disk(v.omega);
                   require_planar(grid, "dist_set_sq");
                 },
                 [&](const HardySigned& v) {
                   if (!radial(grid)) {
                     throw ConstructionError("hardy_signed requires radial_ball mode (spec/grid mode mismatch)");
                   }
                   const int n = grid.dimension();
                   if (n < 3 || !(v.alpha > 0.0) || !(v.alpha < n - 2)) {
                     throw ConstructionError("hardy_signed requires N >= 3 and 0 < alpha < N - 2");
                   }
                   if (std::get<RadialBall>(grid.spec().shape).radius > 1.0) {
                     throw ConstructionError("hardy_signed is defined on the unit ball (radius <= 1)");
                   }
                 },
                 [&](const BrezisMarcus& v) {
                   require_disk(v.omega);
                   require_planar(grid, "brezis_marcus");
                 },
                 [&](const InversePowerRadial& v) {
                   if (!(v.beta >= 0.0)) throw ConstructionError("inverse_power_radial requires beta >= 0");
                 },
                 [&](const ConstantPotential& v) {
                   if (!std::isfinite(v.value)) throw ConstructionError("constant potential must be finite");
                 },
                 [&](const PotentialSum& v) {
                   if (v.terms.empty()) throw ConstructionError("sum potential needs at least one term");
                   for (const auto& t : v.terms) validate(t, grid);
                 }},
             spec.kind);
}

double point_value(const PotentialSpec& spec, const Grid& grid, Point p) {
  const int n = grid.dimension();
  return std::visit(
      Overloaded{[&](const HardyPoint& v) {
                   const double r = radial(grid) ? p.x : distance(p, v.a);
                   return v.kappa == 0.0 ? 0.0 : (r == 0.0 ? kInf : v.kappa / (r * r));
                 },
                 [&](const InversePowerAxis& v) {
                   return p.x == 0.0 ? (v.alpha == 0.0 ? 1.0 : kInf) : std::pow(std::abs(p.x), -v.alpha);
                 },
                 [&](const DistBoundarySq& v) {
                   const double d = std::abs(distance(p, v.omega.center) - v.omega.radius);
                   return d == 0.0 ? kInf : 1.0 / (d * d);
                 },
                 [&](const DistSetSq& v) {
                   const double d = distance(p, v.omega.center) - v.omega.radius;
                   return d <= 0.0 ? kInf : 1.0 / (d * d);
                 },
                 [&](const HardySigned& v) {
                   const double r = p.x;
                   if (r <= 0.0 || r >= 1.0) return -kInf;
                   return -v.alpha * (n - 2 - v.alpha) / (r * r * (1.0 - std::pow(r, v.alpha)));
                 },
                 [&](const BrezisMarcus& v) {
                   const double rho = distance(p, v.omega.center);
                   const double d = std::abs(rho - v.omega.radius);
                   if (d == 0.0) return kInf;
                   const double mag = 1.0 / (4.0 * d * d);
                   return rho < v.omega.radius ? -mag : mag;
                 },
                 [&](const InversePowerRadial& v) {
                   const double r = radial(grid) ? p.x : std::hypot(p.x, p.y);
                   return r == 0.0 ? (v.beta == 0.0 ? 1.0 : kInf) : std::pow(r, -v.beta);
                 },
                 [&](const ConstantPotential& v) { return v.value; },
                 [&](const PotentialSum& v) {
                   double sum = 0.0;
                   for (const auto& t : v.terms) sum += point_value(t, grid, p);
                   return sum;
                 }},
      spec.kind);
}

double cell_average(const PotentialSpec& spec, const Grid& grid, std::size_t node, int subsamples) {
  const Cell cell = grid.sampling_cell(node);
  const CellSampler sampler{grid, subsamples};
  const int n = grid.dimension();
  const auto sample = [&](Point p) { return point_value(spec, grid, p); };
  return std::visit(
      Overloaded{[&](const HardyPoint& v) {
                   if (v.kappa == 0.0) return 0.0;
                   // |x - a|^{-2} is integrable near a only when 2 < dimension.
                   if (radial(grid)) {
                     if (cell.x_lo == 0.0 && n <= 2) return kInf;
                   } else if (cell_contains(cell, v.a)) {
                     return kInf;
                   }
                   return sampler.mean(cell, sample);
                 },
                 [&](const InversePowerAxis& v) { return mean_inverse_power_1d(cell.x_lo, cell.x_hi, v.alpha); },
                 [&](const DistBoundarySq& v) {
                   return cell_meets_circle(cell, v.omega) ? kInf : sampler.mean(cell, sample);
                 },
                 [&](const DistSetSq& v) {
                   return cell_meets_disk(cell, v.omega) ? kInf : sampler.mean(cell, sample);
                 },
                 [&](const HardySigned&) {
                   // 1/(1 - r^alpha) is not integrable across r = 1; r^{-2} is integrable at 0 for N >= 3.
                   return cell.x_hi >= 1.0 ? -kInf : sampler.mean(cell, sample);
                 },
                 [&](const BrezisMarcus& v) {
                   return cell_meets_circle(cell, v.omega) ? kInf : sampler.mean(cell, sample);
                 },
                 [&](const InversePowerRadial& v) {
                   if (v.beta == 0.0) return 1.0;
                   if (radial(grid)) {
                     if (cell.x_lo == 0.0 && v.beta >= n) return kInf;
                     return sampler.mean(cell, sample);
                   }
                   if (!cell_contains(cell, {0.0, 0.0})) return sampler.mean(cell, sample);
                   if (v.beta >= 2.0) return kInf;
                   // A subsample sitting on the origin is replaced by the exact mean
                   // over the equal-area disk of its subcell.
                   const double side = grid.h() / subsamples;
                   const double rho = side / std::sqrt(std::numbers::pi);
                   const double disk_mean = 2.0 / (2.0 - v.beta) * std::pow(rho, -v.beta);
                   return sampler.mean(cell, [&](Point p) {
                     const double value = sample(p);
                     return std::isinf(value) ? disk_mean : value;
                   });
                 },
                 [&](const ConstantPotential& v) { return v.value; },
                 [&](const PotentialSum& v) {
                   double sum = 0.0;
                   bool plus_inf = false, minus_inf = false;
                   for (const auto& t : v.terms) {
                     const double a = cell_average(t, grid, node, subsamples);
                     if (a == kInf) plus_inf = true;
                     else if (a == -kInf) minus_inf = true;
                     else sum += a;
                   }
                   // A divergent positive part makes the node a barrier regardless of V-.
                   if (plus_inf) return kInf;
                   if (minus_inf) return -kInf;
                   return sum;
                 }},
      spec.kind);
}

ScalarField SplitPotential::signed_values() const {
  ScalarField out = vplus;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= vminus[i];
  return out;
}

ScalarField SplitPotential::abs_values() const {
  ScalarField out = vplus;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += vminus[i];
  return out;
}

std::size_t SplitPotential::hard_count() const {
  return static_cast<std::size_t>(std::count(hard_mask.begin(), hard_mask.end(), std::uint8_t{1}));
}

SplitPotential evaluate(const PotentialSpec& spec, const GridPtr& grid, const EvaluateOptions& options) {
  if (options.subsamples < 1 || options.subsamples % 2 == 0) {
    throw PreconditionError("subsamples must be a positive odd integer");
  }
  if (!(options.clip > 0.0)) throw PreconditionError("clip must be positive");
  validate(spec, *grid);
  const std::size_t n = grid->size();
  std::vector<double> plus(n, 0.0), minus(n, 0.0);
  NodeMask hard(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double avg = cell_average(spec, *grid, i, options.subsamples);
    const double value = std::clamp(avg, -options.clip, options.clip);
    if (avg >= options.clip) hard[i] = 1;
    if (value > 0.0) plus[i] = value;
    else minus[i] = -value;
  }
  return {ScalarField(grid, std::move(plus)), ScalarField(grid, std::move(minus)), std::move(hard), options.clip};
}

ScalarField truncate_plus(const ScalarField& f, double n) {
  if (!(n >= 0.0)) throw PreconditionError("truncation level must be nonnegative");
  ScalarField out = f;
  for (double& v : out.values()) v = std::min(v, n);
  return out;
}

ScalarField truncate_signed(const ScalarField& f, double k) {
  if (!(k >= 0.0)) throw PreconditionError("truncation level must be nonnegative");
  ScalarField out = f;
  for (double& v : out.values()) v = std::clamp(v, -k, k);
  return out;
}

namespace {

// Integral of |z|^{-1} over the part of the sphere |y| = s inside B_delta(x), |x| = r (N = 3).
double shell_kernel(double r, double s, double delta) {
  if (r == 0.0) return s < delta ? 4.0 * std::numbers::pi * s : 0.0;
  const double span = std::min(delta, r + s) - std::abs(r - s);
  return span > 0.0 ? 2.0 * std::numbers::pi * s / r * span : 0.0;
}

double kato_radial(const Grid& grid, const ScalarField& abs_v, double delta, int subsamples) {
  const double h = grid.h();
  const double radius = std::get<RadialBall>(grid.spec().shape).radius;
  const auto nodes = grid.nodes();
  const std::size_t n = nodes.size();
  // Quadrature cells covering [0, R].
  std::vector<double> lo(n), hi(n);
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = j == 0 ? 0.0 : nodes[j].x - 0.5 * h;
    hi[j] = j + 1 == n ? radius : nodes[j].x + 0.5 * h;
  }
  const int q = 8 * subsamples;
  const auto eta_at = [&](double r) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (abs_v[j] == 0.0 || lo[j] > r + delta || hi[j] < r - delta) continue;
      const double width = (hi[j] - lo[j]) / q;
      double kernel = 0.0;
      for (int k = 0; k < q; ++k) kernel += shell_kernel(r, lo[j] + (k + 0.5) * width, delta);
      total += abs_v[j] * kernel * width;
    }
    return total;
  };
  double best = eta_at(0.0);
  for (const Node& node : nodes) best = std::max(best, eta_at(node.x));
  return best;
}

double kato_planar(const Grid& grid, const ScalarField& abs_v, double delta, int subsamples) {
  const double h = grid.h();
  const auto nodes = grid.nodes();
  const auto weights = grid.quad_weights();
  // Self cell: mean of log(2 delta / |z|) over a 2m x 2m midpoint lattice, which never hits z = 0.
  const int q = 2 * subsamples;
  double self = 0.0;
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      const double zx = (-0.5 + (a + 0.5) / q) * h;
      const double zy = (-0.5 + (b + 0.5) / q) * h;
      self += std::log(2.0 * delta / std::hypot(zx, zy));
    }
  }
  self *= h * h / (static_cast<double>(q) * q);
  const int reach = static_cast<int>(std::ceil(delta / h));
  double best = 0.0;
  for (std::size_t x = 0; x < nodes.size(); ++x) {
    double total = abs_v[x] * self;
    for (int di = -reach; di <= reach; ++di) {
      for (int dj = -reach; dj <= reach; ++dj) {
        if (di == 0 && dj == 0) continue;
        const double dist = h * std::hypot(di, dj);
        if (dist >= delta) continue;
        const auto y = grid.node_at(nodes[x].i + di, nodes[x].j + dj);
        if (!y) continue;
        total += abs_v[*y] * std::log(2.0 * delta / dist) * weights[*y];
      }
    }
    best = std::max(best, total);
  }
  return best;
}

}  // namespace

double kato_eta(const SplitPotential& potential, double delta, int dimension, int subsamples) {
  const Grid& grid = *potential.vplus.grid();
  if (!(delta >= grid.h())) throw PreconditionError("unresolved radius: delta must be at least h");
  const ScalarField abs_v = potential.abs_values();
  if (grid.mode() == GridMode::radial) {
    if (dimension != 3 || grid.dimension() != 3) {
      throw PreconditionError("radial Kato estimator supports N = 3 on a 3-ball profile only");
    }
    return kato_radial(grid, abs_v, delta, subsamples);
  }
  if (dimension != 2) throw PreconditionError("planar Kato estimator uses the N = 2 logarithmic kernel");
  return kato_planar(grid, abs_v, delta, subsamples);
}

double kato_eta(const PotentialSpec& spec, const GridPtr& grid, double delta, int dimension,
                const EvaluateOptions& options) {
  return kato_eta(evaluate(spec, grid, options), delta, dimension, options.subsamples);
}

KatoReport kato_report(const PotentialSpec& spec, const GridPtr& grid, const std::vector<double>& deltas,
                       int dimension, double fraction, const EvaluateOptions& options) {
  if (deltas.empty()) throw PreconditionError("kato_report needs a nonempty delta sequence");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (deltas[k] < 2.0 * grid->h()) throw PreconditionError("kato_report deltas must all be >= 2h");
    if (k > 0 && !(deltas[k] < deltas[k - 1])) throw PreconditionError("kato_report deltas must be decreasing");
  }
  const SplitPotential split = evaluate(spec, grid, options);
  KatoReport report;
  report.fraction = fraction;
  for (double delta : deltas) report.rows.push_back({delta, kato_eta(split, delta, dimension, options.subsamples)});
  report.vanishing = report.rows.back().eta < fraction * report.rows.front().eta;
  return report;
}

}  // namespace torsionlab
