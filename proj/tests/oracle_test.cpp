#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "torsionlab/error.hpp"
#include "torsionlab/oracle.hpp"

namespace tl = torsionlab;
namespace oracle = torsionlab::oracle;

TEST(Oracle, VAlphaFrozenValue) {
  EXPECT_NEAR(oracle::v_alpha(0.5, 3, 0.5), -1.0 / (1.0 - std::pow(2.0, -0.5)), 1e-12);
  EXPECT_NEAR(oracle::v_alpha(0.5, 3, 0.5), -3.4142, 1e-4);
  for (double r : {0.01, 0.3, 0.99}) EXPECT_LT(oracle::v_alpha(r, 5, 2.5), 0.0);
}

TEST(Oracle, UAlpha) {
  EXPECT_EQ(oracle::u_alpha(1.0, 1.5), 0.0);
  EXPECT_NEAR(oracle::u_alpha(0.25, 0.5), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(oracle::u_alpha(0.0, 0.5)));
}

TEST(Oracle, FamilyValidation) {
  EXPECT_NO_THROW((oracle::HardyFamily{5, 2.5, 1.5}.validate()));
  EXPECT_THROW((oracle::HardyFamily{2, 0.5, 0.5}.validate()), tl::PreconditionError);
  EXPECT_THROW((oracle::HardyFamily{5, 3.5, 1.5}.validate()), tl::PreconditionError);
  EXPECT_THROW((oracle::HardyFamily{5, 2.5, 1.0}.validate()), tl::PreconditionError);
}

TEST(Oracle, DatumPositiveAboveLowerBound) {
  const oracle::HardyFamily family{5, 2.5, 1.5};
  for (int k = 1; k <= 99; ++k) {
    const double r = k / 100.0;
    const double f = oracle::f_alpha_beta(r, family);
    EXPECT_GT(f, 0.0);
    EXPECT_GE(f, oracle::f_alpha_beta_lower_bound(r, family) - 1e-12 * std::max(1.0, f));
  }
}

TEST(Oracle, DatumMatchesFiniteDifference) {
  // -u'' - (N-1)/r u' + V u by central differences with a tiny step.
  const oracle::HardyFamily family{5, 2.5, 1.5};
  const auto u = [&](double r) { return oracle::u_alpha(r, family.beta); };
  for (double r : {0.2, 0.5, 0.8}) {
    const double d = 1e-4;
    const double second = (u(r + d) - 2 * u(r) + u(r - d)) / (d * d);
    const double first = (u(r + d) - u(r - d)) / (2 * d);
    const double f = -second - (family.n - 1) / r * first + oracle::v_alpha(r, family.n, family.alpha) * u(r);
    EXPECT_NEAR(oracle::f_alpha_beta(r, family) / f, 1.0, 1e-5);
  }
}

TEST(Oracle, ResidualIsSecondOrder) {
  const oracle::HardyFamily family{5, 2.5, 1.5};
  const double ratio = oracle::radial_residual(family, 1.0 / 200) / oracle::radial_residual(family, 1.0 / 400);
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}

TEST(Oracle, TorsionClosedForms) {
  EXPECT_NEAR(oracle::torsion_ball(0.0, 3, 1.0), 1.0 / 6, 1e-15);
  EXPECT_NEAR(oracle::torsion_ball(0.5, 2, 2.0), 3.75 / 4, 1e-15);
  EXPECT_NEAR(oracle::torsion_rectangle({0, 1, 0, 1}, 0.5, 0.5), 0.07367, 1e-5);
  EXPECT_NEAR(oracle::torsion_rectangle({0, 1, 0, 1}, 0.0, 0.3), 0.0, 1e-15);
  // A long strip approaches the 1D profile x (1 - x) / 2 in the middle.
  EXPECT_NEAR(oracle::torsion_rectangle({0, 1, -20, 20}, 0.5, 0.0), 0.125, 1e-6);
  EXPECT_NEAR(oracle::torsion_exact(tl::DomainSpec::disk({1, 1}, 2.0), {1, 1}), 1.0, 1e-15);
  EXPECT_THROW(oracle::torsion_exact(tl::DomainSpec::disk({0, 0}, 1.0).with_inner({{0, 0}, 0.5}), {0, 0}),
               tl::PreconditionError);
}

TEST(Oracle, TruncationScanCritical) {
  const auto rows = oracle::truncation_energy_scan(4, 1.0, {10.0, 100.0}, 1e-4);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[1].dirichlet, rows[0].dirichlet);
  EXPECT_LT(rows[1].potential, 0.0);
  EXPECT_NEAR(rows[1].energy, rows[1].dirichlet + rows[1].potential, 1e-9 * rows[1].dirichlet);
}

TEST(Oracle, SlabProfile) {
  const auto s = oracle::slab_defect_1d(1.5, 1e-3);
  EXPECT_NEAR(s.density, 2 * s.u.front() / s.h, 1e-12);
  for (double v : s.u) EXPECT_GE(v, 0.0);
  EXPECT_LT(*std::max_element(s.u.begin(), s.u.end()), 0.125);
}
