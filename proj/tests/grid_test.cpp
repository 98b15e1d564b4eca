#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "torsionlab/error.hpp"
#include "torsionlab/field.hpp"
#include "torsionlab/grid.hpp"
#include "torsionlab/integrals.hpp"

namespace tl = torsionlab;
using std::numbers::pi;

TEST(Grid, UnitSquareQuarterHasNineNodesTwelveEdges) {
  const auto g = tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), 0.25);
  EXPECT_EQ(g->size(), 9u);
  ASSERT_EQ(g->edges().size(), 12u);
  for (const tl::Edge& e : g->edges()) EXPECT_DOUBLE_EQ(e.coeff, 16.0);
}

TEST(Grid, RadialBallNodesAndShellWeights) {
  const double h = 0.25;
  const auto g = tl::Grid::build(tl::DomainSpec::radial_ball(3, 1.0), h);
  ASSERT_EQ(g->size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(g->nodes()[k].x, (k + 1) * h);
  // The interior shell is [r - h/2, r + h/2]: 4 pi (r^2 h + h^3 / 12).
  const double r = 0.5;
  EXPECT_NEAR(g->quad_weights()[1], 4 * pi * (r * r * h + h * h * h / 12), 1e-14);
  double total = 0.0;
  for (double w : g->quad_weights()) total += w;
  EXPECT_NEAR(total, 4 * pi / 3, 1e-13);
}

TEST(Grid, DiskQuadratureApproachesPi) {
  const auto g = tl::Grid::build(tl::DomainSpec::disk({0, 0}, 1.0), 1.0 / 64);
  EXPECT_NEAR(tl::integrate(*g, tl::ScalarField::constant(g, 1.0)), pi, 5e-2);
}

TEST(Grid, RectangleQuadratureIsExact) {
  const auto g = tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 10);
  EXPECT_NEAR(tl::integrate(*g, tl::ScalarField::constant(g, 1.0)), 1.0, 1e-13);
  const auto wide = tl::Grid::build(tl::DomainSpec::rectangle(-1, 2, 0, 0.5), 1.0 / 8);
  EXPECT_NEAR(tl::integrate(*wide, tl::ScalarField::constant(wide, 1.0)), 1.5, 1e-13);
}

TEST(Grid, EdgeCoefficientsPositive) {
  for (const auto& spec : {tl::DomainSpec::disk({0.1, -0.2}, 0.7), tl::DomainSpec::radial_ball(5, 2.0)}) {
    const auto g = tl::Grid::build(spec, 1.0 / 32);
    for (const tl::Edge& e : g->edges()) {
      EXPECT_GT(e.coeff, 0.0);
      EXPECT_GT(e.measure, 0.0);
    }
  }
}

TEST(Grid, RejectsBadDomains) {
  EXPECT_THROW(tl::Grid::build(tl::DomainSpec::rectangle(1, 0, 0, 1), 0.1), tl::ConstructionError);
  EXPECT_THROW(tl::Grid::build(tl::DomainSpec::disk({0, 0}, -1), 0.1), tl::ConstructionError);
  EXPECT_THROW(tl::Grid::build(tl::DomainSpec::radial_ball(1, 1), 0.1), tl::ConstructionError);
  const auto leaking = tl::DomainSpec::rectangle(0, 1, 0, 1).with_inner({{0.5, 0.5}, 0.5});
  EXPECT_THROW(tl::Grid::build(leaking, 1.0 / 16), tl::ConstructionError);
}

TEST(Grid, NearestNodeAndLattice) {
  const auto g = tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), 0.25);
  const std::size_t c = g->nearest_node({0.49, 0.52});
  EXPECT_DOUBLE_EQ(g->nodes()[c].x, 0.5);
  EXPECT_DOUBLE_EQ(g->nodes()[c].y, 0.5);
  EXPECT_EQ(g->neighbors(c).size(), 4u);
}

TEST(Integrals, GradientEnergyOfZeroIsZero) {
  const auto g = tl::Grid::build(tl::DomainSpec::disk({0, 0}, 1.0), 1.0 / 16);
  EXPECT_EQ(tl::gradient_energy(*g, tl::ScalarField(g)), 0.0);
}

TEST(Integrals, RadialGradientEnergyOfLinearProfile) {
  // xi = 1 - r has |grad xi| = 1, so the energy is the ball volume.
  for (double h : {1.0 / 100, 1.0 / 200}) {
    const auto g = tl::Grid::build(tl::DomainSpec::radial_ball(3, 1.0), h);
    const auto xi = tl::ScalarField::from_nodes(g, [](const tl::Node& n) { return 1.0 - n.x; });
    EXPECT_NEAR(tl::gradient_energy(*g, xi), 4 * pi / 3, 4 * h * h * 10);
  }
}

TEST(Integrals, InnerIsSymmetric) {
  const auto g = tl::Grid::build(tl::DomainSpec::disk({0, 0}, 1.0), 1.0 / 16);
  const auto f = tl::uniform_random_field(g, 1), h = tl::uniform_random_field(g, 2);
  EXPECT_DOUBLE_EQ(tl::inner(*g, f, h), tl::inner(*g, h, f));
}

TEST(Integrals, PairMeasure) {
  const auto g = tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 8);
  const auto xi = tl::uniform_random_field(g, 3);
  EXPECT_DOUBLE_EQ(tl::pair_measure(*g, xi, tl::DiscreteMeasure::atom(g, 7)), xi[7]);
  EXPECT_NEAR(tl::pair_measure(*g, tl::ScalarField::constant(g, 1.0),
                               tl::DiscreteMeasure::from_density(tl::ScalarField::constant(g, 1.0))),
              1.0, 1e-13);
  const auto f = tl::uniform_random_field(g, 4);
  EXPECT_DOUBLE_EQ(tl::pair_measure(*g, xi, tl::DiscreteMeasure::from_density(f)), tl::inner(*g, xi, f));
}

TEST(Field, RandomFieldIsReproducible) {
  const auto g = tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 8);
  const auto a = tl::uniform_random_field(g, 9), b = tl::uniform_random_field(g, 9);
  for (std::size_t k = 0; k < g->size(); ++k) {
    EXPECT_EQ(a[k], b[k]);
    EXPECT_GE(a[k], 0.0);
    EXPECT_LT(a[k], 1.0);
  }
}

TEST(Field, RequireSameGrid) {
  const auto a = tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 8);
  const auto b = tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 8);
  EXPECT_THROW(tl::require_same_grid(tl::ScalarField(a), tl::ScalarField(b)), tl::GridMismatch);
}
