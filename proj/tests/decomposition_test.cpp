#include <cmath>

#include <gtest/gtest.h>

#include "torsionlab/decomposition.hpp"
#include "torsionlab/error.hpp"
#include "torsionlab/oracle.hpp"
#include "torsionlab/variational.hpp"

namespace tl = torsionlab;

namespace {

struct Pipeline {
  tl::SplitPotential split;
  tl::ScalarField zeta;
  tl::DecompositionResult dec;
};

Pipeline run(const tl::DomainSpec& domain, double h, const tl::PotentialSpec& v) {
  const auto g = tl::Grid::build(domain, h);
  auto split = tl::evaluate(v, g);
  auto zeta = tl::torsion(tl::SchroedingerOperator::positive_part(split));
  auto dec = tl::decompose(zeta, split.hard_mask);
  return {std::move(split), std::move(zeta), std::move(dec)};
}

const tl::DomainSpec disk = tl::DomainSpec::disk({0, 0}, 1.0);

}  // namespace

TEST(Decomposition, FreeSquareHasEmptyS) {
  const Pipeline r = run(tl::DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 32, tl::PotentialSpec::constant(0.0));
  EXPECT_EQ(r.dec.s_size(), 0u);
  EXPECT_EQ(r.dec.component_count, 1);
}

TEST(Decomposition, LabelsPartitionTheGrid) {
  const Pipeline r = run(disk, 1.0 / 32, tl::PotentialSpec{tl::DistBoundarySq{{{0, 0}, 0.5}}});
  std::size_t labeled = 0;
  for (std::size_t k = 0; k < r.dec.labels.size(); ++k) {
    EXPECT_NE(r.dec.s_nodes[k] != 0, r.dec.labels[k] >= 0);
    labeled += r.dec.labels[k] >= 0;
  }
  EXPECT_EQ(labeled + r.dec.s_size(), r.dec.grid->size());
  std::size_t total = 0;
  for (std::size_t s : r.dec.component_sizes) total += s;
  EXPECT_EQ(total, labeled);
  EXPECT_EQ(r.dec.component_count, 2);
}

TEST(Decomposition, LabelsAreFourConnected) {
  const Pipeline r = run(disk, 1.0 / 32, tl::PotentialSpec{tl::InversePowerAxis{1.5}});
  const auto& g = *r.dec.grid;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (r.dec.labels[k] < 0) continue;
    for (std::size_t n : g.neighbors(k)) {
      if (r.dec.labels[n] >= 0) EXPECT_EQ(r.dec.labels[n], r.dec.labels[k]);
    }
  }
  EXPECT_EQ(r.dec.component_count, 2);
}

TEST(Decomposition, HardyPointAndSetPotential) {
  const double h = 1.0 / 32;
  const Pipeline point = run(disk, h, tl::PotentialSpec{tl::HardyPoint{{0, 0}, 1.0}});
  EXPECT_EQ(point.dec.component_count, 1);
  for (std::size_t k = 0; k < point.dec.s_nodes.size(); ++k) {
    if (!point.dec.s_nodes[k]) continue;
    EXPECT_LE(std::abs(point.dec.grid->nodes()[k].x), h);
    EXPECT_LE(std::abs(point.dec.grid->nodes()[k].y), h);
  }
  const Pipeline set = run(disk, h, tl::PotentialSpec{tl::DistSetSq{{{0, 0}, 0.3}}});
  for (std::size_t k = 0; k < set.dec.s_nodes.size(); ++k) {
    const auto& n = set.dec.grid->nodes()[k];
    if (std::hypot(n.x, n.y) <= 0.3 - h) EXPECT_TRUE(set.dec.s_nodes[k]);
  }
}

TEST(Decomposition, BrezisMarcusTwoComponents) {
  const tl::Disk omega{{0.5, 0.5}, 0.5};
  const Pipeline r = run(tl::DomainSpec::rectangle(-0.25, 1.25, -0.25, 1.25).with_inner(omega), 1.0 / 32,
                    tl::PotentialSpec{tl::BrezisMarcus{omega}});
  EXPECT_EQ(r.dec.component_count, 2);
}

TEST(Decomposition, CutoffReconstruction) {
  const Pipeline r = run(disk, 1.0 / 32, tl::PotentialSpec{tl::InversePowerAxis{1.5}});
  const auto u = tl::uniform_random_field(r.dec.grid, 3);
  tl::ScalarField sum(r.dec.grid);
  for (int i = 0; i < r.dec.component_count; ++i) {
    const auto c = tl::cutoff(u, r.dec, i);
    for (std::size_t k = 0; k < u.size(); ++k) sum[k] += c[k];
  }
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_EQ(sum[k] + (r.dec.s_nodes[k] ? u[k] : 0.0), u[k]);
  const auto c0 = tl::cutoff(u, r.dec, 0);
  const auto again = tl::cutoff(c0, r.dec, 0);
  for (std::size_t k = 0; k < u.size(); ++k) EXPECT_EQ(again[k], c0[k]);
  EXPECT_THROW(r.dec.component_mask(5), tl::PreconditionError);
}

TEST(Decomposition, LocalizedSolveMatchesCutoff) {
  const Pipeline r = run(disk, 1.0 / 32, tl::PotentialSpec{tl::InversePowerAxis{1.5}});
  const auto op = tl::SchroedingerOperator::positive_part(r.split);
  for (int i = 0; i < r.dec.component_count; ++i) {
    const auto mask = r.dec.component_mask(i);
    const tl::DiscreteMeasure chi = tl::DiscreteMeasure::from_density(tl::ScalarField::constant(r.dec.grid, 1.0));
    const auto local = tl::minimize_energy(op, tl::restrict_measure(chi, mask), {tl::SolverMethod::cholesky});
    const auto cut = tl::cutoff(r.zeta, r.dec, i);
    for (std::size_t k = 0; k < cut.size(); ++k) EXPECT_NEAR(local[k], cut[k], 1e-10 * r.zeta.sup_abs());
  }
}

TEST(MaxPrinciple, Verdicts) {
  const Pipeline r = run(disk, 1.0 / 32, tl::PotentialSpec{tl::InversePowerAxis{1.5}});
  const auto one = tl::DiscreteMeasure::from_density(tl::ScalarField::constant(r.dec.grid, 1.0));
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(tl::strong_max_principle_check(r.zeta, one, r.dec, i).status, tl::MaxPrincipleVerdict::Status::holds);
  }
  const auto op = tl::SchroedingerOperator::positive_part(r.split);
  const int right = r.dec.labels[r.dec.grid->nearest_node({0.5, 0})];
  const auto atom = tl::DiscreteMeasure::atom(r.dec.grid, r.dec.grid->nearest_node({0.5, 0}));
  const auto u = tl::minimize_energy(op, atom, {tl::SolverMethod::cholesky});
  const int left = 1 - right;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (r.dec.labels[k] == left) EXPECT_EQ(u[k], 0.0);
  }
  EXPECT_EQ(tl::strong_max_principle_check(u, atom, r.dec, left).status,
            tl::MaxPrincipleVerdict::Status::not_applicable);
}

TEST(Defect, EmptySIsNotApplicable) {
  const Pipeline r = run(tl::DomainSpec::rectangle(0, 1, 0, 1), 1.0 / 16, tl::PotentialSpec::constant(0.0));
  const auto est = tl::defect_estimate(r.zeta, r.dec);
  EXPECT_FALSE(est.applicable);
  EXPECT_TRUE(est.densities.empty());
}

TEST(Defect, AxisPowerTrend) {
  const std::vector<double> widths{1.0 / 32, 1.0 / 64, 1.0 / 128};
  const auto stable = tl::defect_refinement(disk, tl::PotentialSpec{tl::InversePowerAxis{1.5}}, widths);
  ASSERT_EQ(stable.trace.size(), 3u);
  for (const auto& row : stable.trace) {
    EXPECT_GT(row.tau_mass, 0.0);
    EXPECT_EQ(row.component_count, 2);
  }
  EXPECT_NEAR(stable.trace[2].tau_mass / stable.trace[0].tau_mass, 1.0, 0.2);
  const auto vanishing = tl::defect_refinement(disk, tl::PotentialSpec{tl::InversePowerAxis{2.5}}, widths);
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_LE(vanishing.trace[k].tau_mass, 0.6 * vanishing.trace[k - 1].tau_mass);
  }
}

TEST(Defect, SlabOracleTrend) {
  const auto a = tl::oracle::slab_defect_1d(2.5, 1e-3), b = tl::oracle::slab_defect_1d(2.5, 5e-4);
  EXPECT_LT(b.density, 0.6 * a.density);
  const auto c = tl::oracle::slab_defect_1d(1.5, 1e-3), d = tl::oracle::slab_defect_1d(1.5, 5e-4);
  EXPECT_NEAR(d.density / c.density, 1.0, 0.05);
}
