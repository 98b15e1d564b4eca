#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "torsionlab/error.hpp"
#include "torsionlab/potential.hpp"

namespace tl = torsionlab;
using std::numbers::pi;

namespace {

tl::GridPtr unit_disk(double h) { return tl::Grid::build(tl::DomainSpec::disk({0, 0}, 1.0), h); }

}  // namespace

TEST(Potential, ConstantSplits) {
  const auto g = unit_disk(1.0 / 16);
  const auto s = tl::evaluate(tl::PotentialSpec::constant(5.0), g);
  EXPECT_EQ(s.hard_count(), 0u);
  for (std::size_t k = 0; k < g->size(); ++k) {
    EXPECT_EQ(s.vplus[k], 5.0);
    EXPECT_EQ(s.vminus[k], 0.0);
  }
  const auto n = tl::evaluate(tl::PotentialSpec::constant(-2.0), g);
  EXPECT_EQ(n.vplus.max(), 0.0);
  EXPECT_EQ(n.vminus.min(), 2.0);
}

TEST(Potential, AxisPowerHardColumn) {
  const double h = 1.0 / 16;
  const auto g = unit_disk(h);
  const auto s = tl::evaluate(tl::PotentialSpec{tl::InversePowerAxis{1.5}}, g);
  std::size_t column = 0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    const bool on_axis = g->nodes()[k].i == 0;
    EXPECT_EQ(static_cast<bool>(s.hard_mask[k]), on_axis);
    column += on_axis;
  }
  EXPECT_EQ(s.hard_count(), column);
  EXPECT_EQ(tl::evaluate(tl::PotentialSpec{tl::InversePowerAxis{0.5}}, g).hard_count(), 0u);
}

TEST(Potential, AxisCellMeanMatchesAntiderivative) {
  // Mean of t^-0.5 over [0, h] is 2 / sqrt(h); over [h/2, 3h/2] it is 2 (sqrt(3h/2) - sqrt(h/2)) / h.
  const double h = 0.01;
  EXPECT_NEAR(tl::inverse_power_cell_mean(-h / 2, h / 2, 0.5), 2 / std::sqrt(h / 2), 1e-10);
  EXPECT_NEAR(tl::inverse_power_cell_mean(h / 2, 3 * h / 2, 0.5), 2 * (std::sqrt(1.5 * h) - std::sqrt(0.5 * h)) / h,
              1e-10);
  EXPECT_TRUE(std::isinf(tl::inverse_power_cell_mean(-h, h, 1.0)));
  EXPECT_GT(tl::inverse_power_cell_mean(-3 * h, -h, 2.5), 0.0);
}

TEST(Potential, TruncationHelpers) {
  const auto g = unit_disk(0.25);
  const auto five = tl::ScalarField::constant(g, 5.0);
  EXPECT_EQ(tl::truncate_plus(five, 3).max(), 3.0);
  EXPECT_EQ(tl::truncate_plus(five, 7).max(), 5.0);
  EXPECT_EQ(tl::truncate_signed(tl::ScalarField::constant(g, -5.0), 2).min(), -2.0);
}

TEST(Potential, HardySignedOnlyOnRadialGrids) {
  EXPECT_THROW(tl::evaluate(tl::PotentialSpec{tl::HardySigned{0.5}}, unit_disk(0.25)), tl::ConstructionError);
  const auto g = tl::Grid::build(tl::DomainSpec::radial_ball(3, 1.0), 0.01);
  const auto s = tl::evaluate(tl::PotentialSpec{tl::HardySigned{0.5}}, g);
  EXPECT_EQ(s.vplus.max(), 0.0);
  EXPECT_GT(s.vminus.min(), 0.0);
}

TEST(Potential, BrezisMarcusSigns) {
  const auto g = tl::Grid::build(tl::DomainSpec::rectangle(-0.25, 1.25, -0.25, 1.25), 1.0 / 32);
  const tl::Disk omega{{0.5, 0.5}, 0.5};
  const tl::PotentialSpec v{tl::BrezisMarcus{omega}};
  EXPECT_NEAR(tl::point_value(v, *g, {0.5, 0.5}), -1.0, 1e-12);
  EXPECT_NEAR(tl::point_value(v, *g, {1.25, 0.5}), 1.0 / (4 * 0.25 * 0.25), 1e-12);
}

TEST(Kato, ConstantPotentialBall) {
  const auto g = tl::Grid::build(tl::DomainSpec::radial_ball(3, 1.0), 1e-3);
  const double c = 2.0;
  for (double delta : {0.2, 0.1}) {
    const double eta = tl::kato_eta(tl::PotentialSpec::constant(c), g, delta, 3);
    EXPECT_NEAR(eta / (c * 2 * pi * delta * delta), 1.0, 0.05);
  }
  const auto report = tl::kato_report(tl::PotentialSpec::constant(c), g, {0.2, 0.1, 0.05, 0.025}, 3);
  EXPECT_TRUE(report.vanishing);
}

TEST(Kato, InversePowerVerdicts) {
  const auto g = tl::Grid::build(tl::DomainSpec::radial_ball(3, 1.0), 1e-3);
  const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
  const auto one = tl::kato_report(tl::PotentialSpec{tl::InversePowerRadial{1.0}}, g, deltas, 3);
  ASSERT_EQ(one.rows.size(), 4u);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(one.rows[k].eta / one.rows[k - 1].eta, 0.5, 0.1);
  EXPECT_TRUE(one.vanishing);
  const auto two = tl::kato_report(tl::PotentialSpec{tl::InversePowerRadial{2.0}}, g, deltas, 3);
  EXPECT_FALSE(two.vanishing);
}

TEST(Kato, UnresolvedRadius) {
  const auto g = tl::Grid::build(tl::DomainSpec::radial_ball(3, 1.0), 0.01);
  EXPECT_THROW(tl::kato_eta(tl::PotentialSpec::constant(1.0), g, 0.005, 3), tl::PreconditionError);
}
