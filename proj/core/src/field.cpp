#include "torsionlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "torsionlab/error.hpp"

namespace torsionlab {

ScalarField::ScalarField(GridPtr grid) : grid_(std::move(grid)), values_(grid_ ? grid_->size() : 0, 0.0) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw PreconditionError("field requires a grid");
  if (values_.size() != grid_->size()) {
    throw PreconditionError("field length " + std::to_string(values_.size()) + " does not match node count " +
                            std::to_string(grid_->size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("field values must be finite");
  }
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, value));
}

double ScalarField::max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end()); }
double ScalarField::sup_abs() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

void require_grid(const Grid& grid, const ScalarField& field) {
  if (field.grid().get() != &grid) throw GridMismatch();
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!a.same_grid(b)) throw GridMismatch();
}

DiscreteMeasure DiscreteMeasure::atom(GridPtr grid, std::size_t node, double mass) {
  if (node >= grid->size()) throw PreconditionError("atom node outside the grid");
  return {ScalarField(std::move(grid)), {Atom{node, mass}}};
}

double DiscreteMeasure::total_variation() const {
  const auto weights = density.grid()->quad_weights();
  double total = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) total += weights[i] * std::abs(density[i]);
  for (const Atom& a : atoms) total += std::abs(a.mass);
  return total;
}

ScalarField DiscreteMeasure::as_density() const {
  ScalarField out = density;
  const auto weights = density.grid()->quad_weights();
  for (const Atom& a : atoms) {
    if (a.node >= out.size()) throw PreconditionError("atom node outside the grid");
    out[a.node] += a.mass / weights[a.node];
  }
  return out;
}

bool DiscreteMeasure::nonnegative() const {
  return std::all_of(density.values().begin(), density.values().end(), [](double v) { return v >= 0.0; }) &&
         std::all_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.mass >= 0.0; });
}

ScalarField uniform_random_field(GridPtr grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField out(std::move(grid));
  for (double& v : out.values()) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return out;
}

}  // namespace torsionlab
