#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "torsionlab/grid.hpp"

namespace torsionlab {

/// Per-node flag (1 = member).
using NodeMask = std::vector<std::uint8_t>;

/// One real value per grid node. Nodes excised from a system (hard nodes,
/// nodes outside a component) carry 0.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid);
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField constant(GridPtr grid, double value);
  template <class F>
  static ScalarField from_nodes(GridPtr grid, F&& f) {
    std::vector<double> values;
    values.reserve(grid->size());
    for (const Node& node : grid->nodes()) values.push_back(f(node));
    return ScalarField(std::move(grid), std::move(values));
  }

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  double max() const;
  double min() const;
  double sup_abs() const;

  bool same_grid(const ScalarField& other) const noexcept { return grid_ == other.grid_; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Independent uniform [0, 1) values from a 64-bit Mersenne twister; identical across platforms.
ScalarField uniform_random_field(GridPtr grid, std::uint64_t seed);

/// Throws GridMismatch unless the field lives on `grid`.
void require_grid(const Grid& grid, const ScalarField& field);
void require_same_grid(const ScalarField& a, const ScalarField& b);

struct Atom {
  std::size_t node = 0;
  double mass = 0.0;
};

/// A finite measure on the grid: a (possibly signed) density against the
/// quadrature weights plus point masses at nodes.
struct DiscreteMeasure {
  ScalarField density;
  std::vector<Atom> atoms;

  static DiscreteMeasure from_density(ScalarField density) { return {std::move(density), {}}; }
  static DiscreteMeasure atom(GridPtr grid, std::size_t node, double mass = 1.0);

  const GridPtr& grid() const noexcept { return density.grid(); }
  double total_variation() const;
  /// Nodewise density with atoms spread over their node's quadrature weight.
  ScalarField as_density() const;
  bool nonnegative() const;
};

}  // namespace torsionlab
