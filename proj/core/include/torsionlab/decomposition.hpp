#pragma once

#include <cstddef>
#include <vector>

#include "torsionlab/field.hpp"
#include "torsionlab/operator.hpp"
#include "torsionlab/potential.hpp"

namespace torsionlab {

/// Zero set S of the torsion function and the connected components D_i of its complement.
struct DecompositionResult {
  GridPtr grid;
  NodeMask s_nodes;
  NodeMask hard_nodes;
  double threshold = 0.0;
  /// Component id per node, -1 on S. Empty until components() has run.
  std::vector<int> labels;
  int component_count = 0;
  std::vector<std::size_t> component_sizes;

  std::size_t s_size() const;
  /// Throws PreconditionError for an invalid id.
  NodeMask component_mask(int i) const;
};

/// S = hard nodes plus nodes with zeta1 <= max(theta_rel * max zeta1, h^2 / 4).
/// Throws PreconditionError("empty complement") when every node lands in S.
DecompositionResult detect_S(const ScalarField& zeta1, const NodeMask& hard_mask, double theta_rel = 1e-3);

/// Labels the connected pieces of the node graph minus S in index order.
DecompositionResult components(DecompositionResult s);

/// detect_S followed by components.
DecompositionResult decompose(const ScalarField& zeta1, const NodeMask& hard_mask, double theta_rel = 1e-3);

/// u * chi_{D_i}.
ScalarField cutoff(const ScalarField& u, const DecompositionResult& decomposition, int i);

/// Restriction of a measure to the nodes of D_i.
DiscreteMeasure restrict_measure(const DiscreteMeasure& nu, const NodeMask& mask);

struct MaxPrincipleVerdict {
  enum class Status { holds, fails, not_applicable };
  Status status = Status::not_applicable;
  double min_value = 0.0;
  std::size_t argmin = 0;
  double integral = 0.0;
};

/// If nu >= 0 on D_i and the integral of u over D_i is positive, u must be positive on all of D_i.
MaxPrincipleVerdict strong_max_principle_check(const ScalarField& u, const DiscreteMeasure& nu,
                                               const DecompositionResult& decomposition, int i);

struct SegmentDensity {
  std::size_t node = 0;
  double density = 0.0;
};

struct RefinementRow {
  double h = 0.0;
  double tau_mass = 0.0;
  int component_count = 0;
};

struct DefectEstimate {
  bool applicable = false;
  double tau_mass = 0.0;
  std::vector<SegmentDensity> densities;
  std::vector<RefinementRow> trace;
};

/// Mass of the measure carried by S: the discrete flux of zeta1 into the S
/// nodes, i.e. the sum over S nodes of the one-sided difference quotients
/// times the segment length. Returns a non-applicable estimate for S empty;
/// throws PreconditionError when S is not a codimension-one interface.
DefectEstimate defect_estimate(const ScalarField& zeta1, const DecompositionResult& decomposition);

struct DefectRunOptions {
  EvaluateOptions evaluate;
  double theta_rel = 1e-3;
  SolveOptions solve;
};

/// Runs potential evaluation, torsion, decomposition, and defect_estimate for
/// each mesh width; the last run's densities are returned with the full trace.
DefectEstimate defect_refinement(const DomainSpec& domain, const PotentialSpec& potential,
                                 const std::vector<double>& widths, const DefectRunOptions& options = {});

}  // namespace torsionlab
