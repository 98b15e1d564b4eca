#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "torsionlab/error.hpp"
#include "torsionlab/integrals.hpp"
#include "torsionlab/oracle.hpp"
#include "torsionlab/variational.hpp"

namespace tl = torsionlab;
using std::numbers::pi;

namespace {

tl::GridPtr unit_square(double h) { return tl::Grid::build(tl::DomainSpec::rectangle(0, 1, 0, 1), h); }

tl::SchroedingerOperator plus_op(const tl::PotentialSpec& v, const tl::GridPtr& g) {
  return tl::SchroedingerOperator::positive_part(tl::evaluate(v, g));
}

}  // namespace

TEST(Operator, MatrixIsSymmetricMMatrix) {
  const auto g = tl::Grid::build(tl::DomainSpec::disk({0, 0}, 1.0), 1.0 / 16);
  const auto op = plus_op(tl::PotentialSpec{tl::HardyPoint{{0.2, 0.1}, 1.0}}, g);
  const tl::SparseMatrix& a = op.matrix();
  EXPECT_LT((tl::SparseMatrix(a.transpose()) - a).norm(), 1e-12 * a.norm());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (tl::SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.row() != it.col()) EXPECT_LE(it.value(), 0.0);
    }
  }
}

TEST(Torsion, RadialBallClosedForm) {
  for (int n : {2, 3, 5}) {
    const double h = 1.0 / 200;
    const auto g = tl::Grid::build(tl::DomainSpec::radial_ball(n, 1.0), h);
    const auto zeta = tl::torsion(plus_op(tl::PotentialSpec::constant(0.0), g));
    for (std::size_t k = 0; k < g->size(); ++k) {
      EXPECT_NEAR(zeta[k], tl::oracle::torsion_ball(g->nodes()[k].x, n, 1.0), 10 * h * h);
    }
  }
}

TEST(Torsion, UnitSquareCenter) {
  const auto g = unit_square(1.0 / 128);
  const auto zeta = tl::torsion(plus_op(tl::PotentialSpec::constant(0.0), g));
  EXPECT_NEAR(zeta[g->nearest_node({0.5, 0.5})], 0.07367, 1e-3);
}

TEST(Torsion, ZeroDatumGivesZero) {
  const auto g = unit_square(1.0 / 16);
  const auto u = tl::minimize_energy(plus_op(tl::PotentialSpec::constant(0.0), g),
                                     tl::DiscreteMeasure::from_density(tl::ScalarField(g)));
  EXPECT_EQ(u.sup_abs(), 0.0);
}

TEST(Torsion, BarrierColumnExcised) {
  const auto g = tl::Grid::build(tl::DomainSpec::disk({0, 0}, 1.0), 1.0 / 32);
  const auto split = tl::evaluate(tl::PotentialSpec{tl::InversePowerAxis{1.5}}, g);
  const auto zeta = tl::torsion(tl::SchroedingerOperator::positive_part(split));
  for (std::size_t k = 0; k < g->size(); ++k) {
    if (split.hard_mask[k]) {
      EXPECT_EQ(zeta[k], 0.0);
    } else {
      EXPECT_GT(zeta[k], 0.0);
    }
  }
}

TEST(Green, SymmetryAndTorsionPairing) {
  const auto g = unit_square(1.0 / 16);
  const auto op = plus_op(tl::PotentialSpec::constant(0.0), g);
  const tl::GreenSolver green(op);
  const auto zeta = tl::torsion(op, {tl::SolverMethod::cholesky});
  for (std::size_t x : {3u, 40u, 100u}) {
    const auto gx = green.column(x);
    for (std::size_t y : {7u, 55u, 120u}) EXPECT_NEAR(gx[y], green.column(y)[x], 1e-12 * gx.sup_abs());
    EXPECT_NEAR(tl::integrate(*g, gx), zeta[x], 1e-10 * zeta[x]);
  }
}

TEST(Green, ColumnsVanishOnOtherComponents) {
  const auto g = tl::Grid::build(tl::DomainSpec::disk({0, 0}, 1.0), 1.0 / 16);
  const auto op = plus_op(tl::PotentialSpec{tl::InversePowerAxis{1.5}}, g);
  const std::size_t x = g->nearest_node({0.5, 0.0});
  const auto gx = tl::GreenSolver(op).column(x);
  for (std::size_t k = 0; k < g->size(); ++k) {
    if (g->nodes()[k].x < 0) EXPECT_EQ(gx[k], 0.0);
  }
  EXPECT_THROW(tl::GreenSolver(op).column(g->nearest_node({0, 0})), tl::PreconditionError);
}

TEST(Green, RepresentationAndReciprocity) {
  const auto g = unit_square(1.0 / 16);
  const auto op = plus_op(tl::PotentialSpec{tl::HardyPoint{{0.25, 0.5}, 1.0}}, g);
  const std::vector<std::size_t> nodes{10, 60, 130};
  tl::DiscreteMeasure nu = tl::DiscreteMeasure::atom(g, 33, 2.0);
  EXPECT_LE(tl::representation_check(op, tl::GreenSolver(op).solve(nu), nu, nodes), 1e-8);
  nu = tl::DiscreteMeasure::from_density(tl::ScalarField::constant(g, 1.0));
  nu.atoms.push_back({40, -0.3});
  EXPECT_LE(tl::representation_check(op, tl::GreenSolver(op).solve(nu), nu, nodes), 1e-8);
  const auto f = tl::uniform_random_field(g, 1);
  EXPECT_EQ(tl::reciprocity_check(op, f, f), 0.0);
  EXPECT_LE(tl::reciprocity_check(op, f, tl::uniform_random_field(g, 2)), 1e-8);
}

TEST(Rayleigh, UnitSquareAndShift) {
  const auto g = unit_square(1.0 / 64);
  const auto zero = tl::evaluate(tl::PotentialSpec::constant(0.0), g);
  const auto r = tl::rayleigh_lambda1(tl::SchroedingerOperator::full(zero));
  EXPECT_NEAR(r.lambda1 / (2 * pi * pi), 1.0, 5e-3);
  const auto shifted = tl::rayleigh_lambda1(tl::SchroedingerOperator::full(zero).shifted(2.5));
  EXPECT_NEAR(shifted.lambda1 - r.lambda1, 2.5, 1e-8);
  EXPECT_NEAR(tl::inner(*g, r.eigenfield, r.eigenfield), 1.0, 1e-10);
}

TEST(Rayleigh, NegativeDirection) {
  const auto g = unit_square(1.0 / 32);
  const auto op = tl::SchroedingerOperator::full(tl::evaluate(tl::PotentialSpec::constant(-2 * pi * pi * 1.01), g));
  const auto r = tl::rayleigh_lambda1(op);
  EXPECT_LT(r.lambda1, 0.0);
  ASSERT_TRUE(r.negative_energy_direction.has_value());
  EXPECT_LT(op.energy(*r.negative_energy_direction), 0.0);
}

TEST(GroundState, IdentityHolds) {
  const auto g = unit_square(1.0 / 32);
  const auto op = plus_op(tl::PotentialSpec::constant(0.0), g);
  const auto u = tl::torsion(op, {tl::SolverMethod::cholesky});
  const auto same = tl::ground_state_identity(op, u, u);
  EXPECT_NEAR(same.edge_term, 0.0, 1e-14 * same.lhs);
  const auto sides = tl::ground_state_identity(op, u, tl::uniform_random_field(g, 5));
  EXPECT_LE(sides.relative_gap, 1e-10);
}

TEST(GroundState, EigenfieldBound) {
  const auto g = unit_square(1.0 / 32);
  const auto op = plus_op(tl::PotentialSpec::constant(0.0), g);
  const auto r = tl::rayleigh_lambda1(op);
  tl::ScalarField f = r.abs_eigenfield;
  for (double& v : f.values()) v *= r.lambda1;
  const auto xi = tl::uniform_random_field(g, 8);
  const double bound = tl::ground_state_bound(op, r.abs_eigenfield, f, xi);
  EXPECT_LE(bound, op.energy(xi) * (1 + 1e-8));
  EXPECT_GE(op.energy(xi), r.lambda1 * tl::inner(*g, xi, xi) * (1 - 1e-8));
}

TEST(Aap, ShiftedSquare) {
  const auto g = unit_square(1.0 / 32);
  const auto split0 = tl::evaluate(tl::PotentialSpec::constant(0.0), g);
  const double l0 = tl::rayleigh_lambda1(tl::SchroedingerOperator::full(split0)).lambda1;
  const auto zero = tl::aap_check(tl::SchroedingerOperator::full(split0));
  EXPECT_TRUE(zero.gap_nonnegative && zero.witness_certified && zero.agree);
  for (double factor : {0.99, 1.01}) {
    const auto split = tl::evaluate(tl::PotentialSpec::constant(-factor * l0), g);
    const auto report = tl::aap_check(tl::SchroedingerOperator::full(split));
    EXPECT_EQ(report.gap_nonnegative, factor < 1);
    EXPECT_EQ(report.witness_certified, factor < 1);
    EXPECT_TRUE(report.agree);
  }
}
