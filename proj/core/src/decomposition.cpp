#include "torsionlab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "torsionlab/error.hpp"
#include "torsionlab/integrals.hpp"
#include "torsionlab/variational.hpp"

namespace torsionlab {

std::size_t DecompositionResult::s_size() const {
  return static_cast<std::size_t>(std::count(s_nodes.begin(), s_nodes.end(), std::uint8_t{1}));
}

NodeMask DecompositionResult::component_mask(int i) const {
  if (i < 0 || i >= component_count) throw PreconditionError("invalid component id " + std::to_string(i));
  NodeMask mask(labels.size(), 0);
  for (std::size_t k = 0; k < labels.size(); ++k) mask[k] = labels[k] == i ? 1 : 0;
  return mask;
}

DecompositionResult detect_S(const ScalarField& zeta1, const NodeMask& hard_mask, double theta_rel) {
  if (!(theta_rel > 0.0 && theta_rel < 1.0)) throw PreconditionError("theta_rel must lie in (0, 1)");
  const Grid& grid = *zeta1.grid();
  if (hard_mask.size() != grid.size()) throw PreconditionError("hard mask length does not match the grid");
  DecompositionResult result;
  result.grid = zeta1.grid();
  result.hard_nodes = hard_mask;
  result.threshold = std::max(theta_rel * zeta1.max(), 0.25 * grid.h() * grid.h());
  result.s_nodes.assign(grid.size(), 0);
  std::size_t count = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (hard_mask[k] || zeta1[k] <= result.threshold) {
      result.s_nodes[k] = 1;
      ++count;
    }
  }
  if (count == grid.size()) throw PreconditionError("empty complement: every node lies in S at this resolution");
  return result;
}

DecompositionResult components(DecompositionResult s) {
  const Grid& grid = *s.grid;
  s.labels.assign(grid.size(), -1);
  s.component_sizes.clear();
  int next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < grid.size(); ++seed) {
    if (s.s_nodes[seed] || s.labels[seed] >= 0) continue;
    std::size_t size = 0;
    s.labels[seed] = next;
    queue.push_back(seed);
    while (!queue.empty()) {
      const std::size_t node = queue.front();
      queue.pop_front();
      ++size;
      for (std::size_t nb : grid.neighbors(node)) {
        if (s.s_nodes[nb] || s.labels[nb] >= 0) continue;
        s.labels[nb] = next;
        queue.push_back(nb);
      }
    }
    s.component_sizes.push_back(size);
    ++next;
  }
  s.component_count = next;
  return s;
}

DecompositionResult decompose(const ScalarField& zeta1, const NodeMask& hard_mask, double theta_rel) {
  return components(detect_S(zeta1, hard_mask, theta_rel));
}

ScalarField cutoff(const ScalarField& u, const DecompositionResult& decomposition, int i) {
  if (u.grid() != decomposition.grid) throw GridMismatch();
  const NodeMask mask = decomposition.component_mask(i);
  ScalarField out = u;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!mask[k]) out[k] = 0.0;
  }
  return out;
}

DiscreteMeasure restrict_measure(const DiscreteMeasure& nu, const NodeMask& mask) {
  DiscreteMeasure out{nu.density, {}};
  for (std::size_t k = 0; k < out.density.size(); ++k) {
    if (!mask[k]) out.density[k] = 0.0;
  }
  for (const Atom& a : nu.atoms) {
    if (mask[a.node]) out.atoms.push_back(a);
  }
  return out;
}

MaxPrincipleVerdict strong_max_principle_check(const ScalarField& u, const DiscreteMeasure& nu,
                                               const DecompositionResult& decomposition, int i) {
  const NodeMask mask = decomposition.component_mask(i);
  const auto weights = u.grid()->quad_weights();
  MaxPrincipleVerdict verdict;
  bool datum_nonnegative = true;
  verdict.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!mask[k]) continue;
    if (nu.density[k] < 0.0) datum_nonnegative = false;
    verdict.integral += weights[k] * u[k];
    if (u[k] < verdict.min_value) {
      verdict.min_value = u[k];
      verdict.argmin = k;
    }
  }
  for (const Atom& a : nu.atoms) {
    if (mask[a.node] && a.mass < 0.0) datum_nonnegative = false;
  }
  if (!datum_nonnegative || !(verdict.integral > 0.0)) {
    verdict.status = MaxPrincipleVerdict::Status::not_applicable;
  } else {
    verdict.status = verdict.min_value > 0.0 ? MaxPrincipleVerdict::Status::holds : MaxPrincipleVerdict::Status::fails;
  }
  return verdict;
}

DefectEstimate defect_estimate(const ScalarField& zeta1, const DecompositionResult& decomposition) {
  const Grid& grid = *zeta1.grid();
  if (zeta1.grid() != decomposition.grid) throw GridMismatch();
  DefectEstimate estimate;
  if (decomposition.s_size() == 0) return estimate;
  if (grid.mode() != GridMode::planar) {
    throw PreconditionError("defect estimator requires codimension-one S (planar grids only)");
  }
  // The interface is the hard part of S when there is one: zeta1 vanishes
  // there exactly, while threshold nodes still carry the equation.
  NodeMask interface(grid.size(), 0);
  bool any_hard = false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (decomposition.s_nodes[k] && decomposition.hard_nodes[k]) {
      interface[k] = 1;
      any_hard = true;
    }
  }
  if (!any_hard) interface = decomposition.s_nodes;

  std::vector<double> flux(grid.size(), 0.0);
  std::vector<int> open_sides(grid.size(), 0);
  for (const Edge& e : grid.edges()) {
    const bool ia = interface[e.a] != 0;
    const bool ib = interface[e.b] != 0;
    if (ia && !ib) {
      flux[e.a] += e.weight() * zeta1[e.b];
      ++open_sides[e.a];
    } else if (ib && !ia) {
      flux[e.b] += e.weight() * zeta1[e.a];
      ++open_sides[e.b];
    }
  }
  const double h = grid.h();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!interface[k]) continue;
    // Nodes on the outer boundary may be closed off by interface neighbors.
    if (open_sides[k] == 0 && grid.neighbors(k).size() == 4) {
      throw PreconditionError("defect estimator requires codimension-one S (S has interior nodes)");
    }
    estimate.densities.push_back({k, flux[k] / h});
    estimate.tau_mass += flux[k];
  }
  estimate.applicable = true;
  return estimate;
}

DefectEstimate defect_refinement(const DomainSpec& domain, const PotentialSpec& potential,
                                 const std::vector<double>& widths, const DefectRunOptions& options) {
  if (widths.empty()) throw PreconditionError("defect_refinement needs at least one mesh width");
  DefectEstimate last;
  std::vector<RefinementRow> trace;
  for (double h : widths) {
    const GridPtr grid = Grid::build(domain, h);
    const SplitPotential split = evaluate(potential, grid, options.evaluate);
    const SchroedingerOperator op = SchroedingerOperator::positive_part(split);
    const ScalarField zeta1 = torsion(op, options.solve);
    const DecompositionResult dec = decompose(zeta1, split.hard_mask, options.theta_rel);
    last = defect_estimate(zeta1, dec);
    trace.push_back({h, last.tau_mass, dec.component_count});
  }
  last.trace = std::move(trace);
  return last;
}

}  // namespace torsionlab
