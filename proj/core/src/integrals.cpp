#include "torsionlab/integrals.hpp"

#include "torsionlab/error.hpp"

namespace torsionlab {

double gradient_energy(const Grid& grid, const ScalarField& xi) {
  require_grid(grid, xi);
  double energy = 0.0;
  for (const Edge& e : grid.edges()) {
    const double d = xi[e.a] - xi[e.b];
    energy += e.weight() * d * d;
  }
  for (const BoundaryEdge& b : grid.boundary_edges()) energy += b.weight() * xi[b.node] * xi[b.node];
  return energy;
}

double integrate(const Grid& grid, const ScalarField& f) {
  require_grid(grid, f);
  const auto w = grid.quad_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i];
  return sum;
}

double inner(const Grid& grid, const ScalarField& f, const ScalarField& g) {
  require_grid(grid, f);
  require_grid(grid, g);
  const auto w = grid.quad_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * f[i] * g[i];
  return sum;
}

double inner(const Grid& grid, const ScalarField& f, const ScalarField& g, const ScalarField& weight) {
  require_grid(grid, f);
  require_grid(grid, g);
  require_grid(grid, weight);
  const auto w = grid.quad_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += w[i] * weight[i] * f[i] * g[i];
  return sum;
}

double pair_measure(const Grid& grid, const ScalarField& xi, const DiscreteMeasure& nu) {
  require_grid(grid, nu.density);
  double sum = inner(grid, xi, nu.density);
  for (const Atom& a : nu.atoms) {
    if (a.node >= grid.size()) throw PreconditionError("atom on a node outside the grid");
    sum += xi[a.node] * a.mass;
  }
  return sum;
}

ScalarField apply_laplacian(const Grid& grid, const ScalarField& xi) {
  require_grid(grid, xi);
  ScalarField out(xi.grid());
  for (const Edge& e : grid.edges()) {
    const double flux = e.weight() * (xi[e.a] - xi[e.b]);
    out[e.a] += flux;
    out[e.b] -= flux;
  }
  for (const BoundaryEdge& b : grid.boundary_edges()) out[b.node] += b.weight() * xi[b.node];
  const auto w = grid.quad_weights();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= w[i];
  return out;
}

}  // namespace torsionlab
