#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace torsionlab {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rectangle {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

struct Disk {
  Point center;
  double radius = 1.0;
};

/// Radial profile of the N-ball B_R. With include_origin the r = 0 node is
/// part of the system (zero-flux closure); otherwise the first node is r = h
/// and no flux crosses r = h/2.
struct RadialBall {
  int dimension = 3;
  double radius = 1.0;
  bool include_origin = false;
};

struct DomainSpec {
  std::variant<Rectangle, Disk, RadialBall> shape;
  std::optional<Disk> inner_region;

  static DomainSpec rectangle(double x0, double x1, double y0, double y1) {
    return {Rectangle{x0, x1, y0, y1}, std::nullopt};
  }
  static DomainSpec disk(Point center, double radius) { return {Disk{center, radius}, std::nullopt}; }
  static DomainSpec radial_ball(int dimension, double radius, bool include_origin = false) {
    return {RadialBall{dimension, radius, include_origin}, std::nullopt};
  }
  DomainSpec with_inner(Disk omega) const {
    DomainSpec copy = *this;
    copy.inner_region = omega;
    return copy;
  }
};

enum class GridMode { planar, radial };

/// Planar nodes sit on the lattice origin + (i h, j h); radial nodes store r in x and j = 0.
struct Node {
  double x = 0.0;
  double y = 0.0;
  int i = 0;
  int j = 0;
};

/// Off-diagonal coupling between two nodes. coeff is the Laplacian coefficient
/// (1/h^2), measure the volume attached to the edge difference quotient, so the
/// Dirichlet energy contribution is coeff * measure * (u_a - u_b)^2.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double coeff = 0.0;
  double measure = 0.0;
  double weight() const noexcept { return coeff * measure; }
};

/// Coupling to the zero Dirichlet ghost value.
struct BoundaryEdge {
  std::size_t node = 0;
  double coeff = 0.0;
  double measure = 0.0;
  double weight() const noexcept { return coeff * measure; }
};

/// Axis-aligned cell used for cell-averaged sampling. Radial cells use [x_lo, x_hi] as the r-range.
struct Cell {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

class Grid {
 public:
  /// Throws ConstructionError naming the violated constraint.
  static GridPtr build(const DomainSpec& spec, double h);

  const DomainSpec& spec() const noexcept { return spec_; }
  GridMode mode() const noexcept { return mode_; }
  /// 2 for planar grids, N for radial grids.
  int dimension() const noexcept { return dimension_; }
  double h() const noexcept { return h_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const double> quad_weights() const noexcept { return quad_weights_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const BoundaryEdge> boundary_edges() const noexcept { return boundary_edges_; }

  /// Neighbors of a node through edges (boundary couplings excluded).
  std::span<const std::size_t> neighbors(std::size_t node) const noexcept {
    return {adjacency_.data() + adjacency_offsets_[node],
            adjacency_.data() + adjacency_offsets_[node + 1]};
  }

  /// Sampling cell of a node: the lattice square [x +- h/2] x [y +- h/2], or [r - h/2, r + h/2] cut at 0.
  Cell sampling_cell(std::size_t node) const;

  /// Planar lattice lookup; nullopt outside the mask or in radial mode.
  std::optional<std::size_t> node_at(int i, int j) const;
  int i_min() const noexcept { return i_min_; }
  int i_max() const noexcept { return i_max_; }
  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }

  std::size_t nearest_node(Point p) const;

  /// Exact measure of the continuous domain.
  double domain_measure() const;

  /// |S^{N-1}|, the area of the unit sphere in R^N (2 pi for planar grids).
  static double unit_sphere_area(int dimension);

 private:
  Grid() = default;
  void finish_adjacency();

  DomainSpec spec_;
  GridMode mode_ = GridMode::planar;
  int dimension_ = 2;
  double h_ = 0.0;
  Point origin_;
  int i_min_ = 0, i_max_ = -1, j_min_ = 0, j_max_ = -1;
  std::vector<std::ptrdiff_t> lattice_;
  std::vector<Node> nodes_;
  std::vector<double> quad_weights_;
  std::vector<Edge> edges_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<std::size_t> adjacency_;
};

}  // namespace torsionlab
