#include "torsionlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "torsionlab/error.hpp"

namespace torsionlab {

namespace {

// Number of whole steps of size h in `length`; throws unless length is a multiple of h.
int whole_steps(double length, double h, const char* what) {
  const double steps = length / h;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
    throw ConstructionError(std::string(what) + " must be an integer multiple of h");
  }
  return static_cast<int>(rounded);
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void validate_inner(const DomainSpec& spec, double h) {
  if (!spec.inner_region) return;
  const Disk& omega = *spec.inner_region;
  if (!(omega.radius > 0.0)) throw ConstructionError("inner_region radius must be positive");
  if (omega.radius < 2.0 * h) throw ConstructionError("inner_region radius must be at least 2h (too-coarse h)");
  double gap = 0.0;
  if (const auto* rect = std::get_if<Rectangle>(&spec.shape)) {
    gap = std::min({omega.center.x - omega.radius - rect->x0, rect->x1 - omega.center.x - omega.radius,
                    omega.center.y - omega.radius - rect->y0, rect->y1 - omega.center.y - omega.radius});
  } else if (const auto* disk = std::get_if<Disk>(&spec.shape)) {
    gap = disk->radius - distance(disk->center, omega.center) - omega.radius;
  } else {
    throw ConstructionError("inner_region is not supported for radial_ball domains");
  }
  if (gap < 2.0 * h) {
    throw ConstructionError("inner_region closure must lie strictly inside the domain with a gap of at least 2h");
  }
}

}  // namespace

double Grid::unit_sphere_area(int dimension) {
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

GridPtr Grid::build(const DomainSpec& spec, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConstructionError("mesh width h must be positive and finite");

  auto grid = std::shared_ptr<Grid>(new Grid());
  grid->spec_ = spec;
  grid->h_ = h;
  const double inv_h2 = 1.0 / (h * h);

  if (const auto* rect = std::get_if<Rectangle>(&spec.shape)) {
    if (!(rect->x1 > rect->x0) || !(rect->y1 > rect->y0)) {
      throw ConstructionError("rectangle requires x1 > x0 and y1 > y0");
    }
    validate_inner(spec, h);
    const int nx = whole_steps(rect->x1 - rect->x0, h, "rectangle width");
    const int ny = whole_steps(rect->y1 - rect->y0, h, "rectangle height");
    if (nx < 4 || ny < 4) throw ConstructionError("h too coarse: need at least 3 interior nodes per axis");
    grid->origin_ = {rect->x0, rect->y0};
    grid->i_min_ = 1;
    grid->i_max_ = nx - 1;
    grid->j_min_ = 1;
    grid->j_max_ = ny - 1;
  } else if (const auto* disk = std::get_if<Disk>(&spec.shape)) {
    if (!(disk->radius > 0.0)) throw ConstructionError("disk radius must be positive");
    validate_inner(spec, h);
    if (disk->radius <= h) throw ConstructionError("h too coarse: need at least 3 interior nodes per axis");
    const int k = static_cast<int>(std::floor(disk->radius / h));
    grid->origin_ = disk->center;
    grid->i_min_ = -k;
    grid->i_max_ = k;
    grid->j_min_ = -k;
    grid->j_max_ = k;
  } else {
    const auto& ball = std::get<RadialBall>(spec.shape);
    if (ball.dimension < 2) throw ConstructionError("radial_ball requires dimension N >= 2");
    if (!(ball.radius > 0.0)) throw ConstructionError("radial_ball radius must be positive");
    validate_inner(spec, h);
    const int n = whole_steps(ball.radius, h, "radial_ball radius");
    if (n < 4) throw ConstructionError("h too coarse: need at least 3 interior radial nodes");

    grid->mode_ = GridMode::radial;
    grid->dimension_ = ball.dimension;
    const int dim = ball.dimension;
    const double sphere = unit_sphere_area(dim);
    const auto shell = [&](double lo, double hi) {
      return sphere / dim * (std::pow(hi, dim) - std::pow(lo, dim));
    };
    const int first = ball.include_origin ? 0 : 1;
    for (int j = first; j < n; ++j) {
      const double r = j * h;
      grid->nodes_.push_back({r, 0.0, j, 0});
      // The first and last cells absorb the leftover half cells so the
      // weights sum to the exact ball volume.
      const double lo = (j == first) ? 0.0 : r - 0.5 * h;
      const double hi = (j == n - 1) ? ball.radius : r + 0.5 * h;
      grid->quad_weights_.push_back(shell(lo, hi));
    }
    for (std::size_t a = 0; a + 1 < grid->nodes_.size(); ++a) {
      const double mid = grid->nodes_[a].x + 0.5 * h;
      grid->edges_.push_back({a, a + 1, inv_h2, sphere * std::pow(mid, dim - 1) * h});
    }
    grid->boundary_edges_.push_back(
        {grid->nodes_.size() - 1, inv_h2, sphere * std::pow(ball.radius - 0.5 * h, dim - 1) * h});
    grid->finish_adjacency();
    return grid;
  }

  // Planar lattice: x-major ordering, nodes outside the mask dropped.
  const int width = grid->i_max_ - grid->i_min_ + 1;
  const int height = grid->j_max_ - grid->j_min_ + 1;
  grid->lattice_.assign(static_cast<std::size_t>(width) * height, -1);
  const auto* disk = std::get_if<Disk>(&spec.shape);
  const auto* rect = std::get_if<Rectangle>(&spec.shape);
  for (int i = grid->i_min_; i <= grid->i_max_; ++i) {
    for (int j = grid->j_min_; j <= grid->j_max_; ++j) {
      const Point p{grid->origin_.x + i * h, grid->origin_.y + j * h};
      if (disk && !(distance(p, disk->center) < disk->radius * (1.0 - 1e-12))) continue;
      double weight = h * h;
      if (rect) {
        const double wx = (i == grid->i_min_ || i == grid->i_max_) ? 1.5 * h : h;
        const double wy = (j == grid->j_min_ || j == grid->j_max_) ? 1.5 * h : h;
        weight = wx * wy;
      }
      grid->lattice_[static_cast<std::size_t>(i - grid->i_min_) * height + (j - grid->j_min_)] =
          static_cast<std::ptrdiff_t>(grid->nodes_.size());
      grid->nodes_.push_back({p.x, p.y, i, j});
      grid->quad_weights_.push_back(weight);
    }
  }
  const double h2 = h * h;
  for (std::size_t a = 0; a < grid->nodes_.size(); ++a) {
    const Node& node = grid->nodes_[a];
    constexpr int di[4] = {1, 0, -1, 0};
    constexpr int dj[4] = {0, 1, 0, -1};
    for (int d = 0; d < 4; ++d) {
      const auto other = grid->node_at(node.i + di[d], node.j + dj[d]);
      if (!other) {
        grid->boundary_edges_.push_back({a, inv_h2, h2});
      } else if (d < 2) {
        grid->edges_.push_back({a, *other, inv_h2, h2});
      }
    }
  }
  grid->finish_adjacency();
  return grid;
}

void Grid::finish_adjacency() {
  std::vector<std::size_t> degree(nodes_.size() + 1, 0);
  for (const Edge& e : edges_) {
    ++degree[e.a + 1];
    ++degree[e.b + 1];
  }
  adjacency_offsets_.assign(nodes_.size() + 1, 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) adjacency_offsets_[i + 1] = adjacency_offsets_[i] + degree[i + 1];
  adjacency_.assign(adjacency_offsets_.back(), 0);
  std::vector<std::size_t> fill(adjacency_offsets_.begin(), adjacency_offsets_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[fill[e.a]++] = e.b;
    adjacency_[fill[e.b]++] = e.a;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[i]),
              adjacency_.begin() + static_cast<std::ptrdiff_t>(adjacency_offsets_[i + 1]));
  }
}

Cell Grid::sampling_cell(std::size_t node) const {
  const Node& n = nodes_[node];
  if (mode_ == GridMode::radial) return {std::max(0.0, n.x - 0.5 * h_), n.x + 0.5 * h_, 0.0, 0.0};
  return {n.x - 0.5 * h_, n.x + 0.5 * h_, n.y - 0.5 * h_, n.y + 0.5 * h_};
}

std::optional<std::size_t> Grid::node_at(int i, int j) const {
  if (mode_ != GridMode::planar) return std::nullopt;
  if (i < i_min_ || i > i_max_ || j < j_min_ || j > j_max_) return std::nullopt;
  const int height = j_max_ - j_min_ + 1;
  const std::ptrdiff_t idx = lattice_[static_cast<std::size_t>(i - i_min_) * height + (j - j_min_)];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

std::size_t Grid::nearest_node(Point p) const {
  if (mode_ == GridMode::planar) {
    const int i = static_cast<int>(std::lround((p.x - origin_.x) / h_));
    const int j = static_cast<int>(std::lround((p.y - origin_.y) / h_));
    if (auto idx = node_at(i, j)) return *idx;
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    const double d = mode_ == GridMode::radial ? std::abs(nodes_[a].x - std::hypot(p.x, p.y))
                                               : distance(p, {nodes_[a].x, nodes_[a].y});
    if (d < best_d) {
      best_d = d;
      best = a;
    }
  }
  return best;
}

double Grid::domain_measure() const {
  if (const auto* rect = std::get_if<Rectangle>(&spec_.shape)) return (rect->x1 - rect->x0) * (rect->y1 - rect->y0);
  if (const auto* disk = std::get_if<Disk>(&spec_.shape)) return std::numbers::pi * disk->radius * disk->radius;
  const auto& ball = std::get<RadialBall>(spec_.shape);
  return unit_sphere_area(ball.dimension) / ball.dimension * std::pow(ball.radius, ball.dimension);
}

}  // namespace torsionlab
