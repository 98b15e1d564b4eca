#include "acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "torsionlab/decomposition.hpp"
#include "torsionlab/error.hpp"
#include "torsionlab/integrals.hpp"
#include "torsionlab/iteration.hpp"
#include "torsionlab/oracle.hpp"
#include "torsionlab/variational.hpp"

namespace torsionlab::cli {

namespace fs = std::filesystem;

bool CriterionReport::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckRow& c) { return c.pass; });
}

namespace {

constexpr double pi = std::numbers::pi;

CheckRow at_most(std::string id, double value, double tol, std::string note = {}) {
  return {std::move(id), value <= tol, value, 0.0, tol, std::move(note)};
}

CheckRow at_least(std::string id, double value, double bound, std::string note = {}) {
  return {std::move(id), value >= bound, value, bound, 0.0, std::move(note)};
}

CheckRow within(std::string id, double value, double expected, double tol, std::string note = {}) {
  return {std::move(id), std::abs(value - expected) <= tol, value, expected, tol, std::move(note)};
}

CheckRow flag(std::string id, bool ok, std::string note = {}) {
  return {std::move(id), ok, ok ? 1.0 : 0.0, 1.0, 0.0, std::move(note)};
}

double num(const Json& c, const char* key) { return c.at(key).get<double>(); }
int integer(const Json& c, const char* key) { return c.at(key).get<int>(); }

Json defaults(int n) {
  switch (n) {
    case 1:
      return {{"radial_h", 1e-3}, {"radial_tol", 1e-5}, {"square_h", 1.0 / 128}, {"square_tol", 1e-3}, {"series_terms", 50}};
    case 2:
      return {{"h", 1.0 / 128}, {"rel_tol", 5e-3}, {"shift", 3.7}, {"shift_tol", 1e-8}};
    case 3:
      return {{"h", 1.0 / 32}, {"trials", 100}, {"tol", 1e-8}, {"identity_tol", 1e-10}, {"seed", 7}};
    case 4:
      return {{"h", 1.0 / 64}, {"omega_radius", 0.5}, {"set_radius", 0.3}};
    case 5:
      return {{"h", 1.0 / 32}, {"trials", 3}, {"tol", 1e-8}, {"seed", 11}};
    case 6:
      return {{"planar_h", 1.0 / 32}, {"radial_h", 1e-2}, {"violation_budget", 1e-12}, {"upper_tol", 1e-8},
              {"final_tol", 1e-6}, {"n_max", 400}, {"seed", 5}};
    case 7:
      return {{"radial_h", 1e-3}, {"alpha", 0.6}, {"certify_tol", 1e-6}, {"square_h", 1.0 / 32}, {"factor", 1.01}};
    case 8:
      return {{"widths", {1.0 / 64, 1.0 / 128, 1.0 / 256}}, {"stable_alpha", 1.5}, {"stable_tol", 0.2},
              {"vanishing_alpha", 2.5}, {"shrink_ratio", 0.6}, {"oracle_h", 1e-5}, {"oracle_vanishing_max", 1e-6}};
    case 9:
      return {{"h", 1.0 / 256}, {"bound", 0.25}};
    case 10:
      return {{"n", 5}, {"alpha", 2.5}, {"beta", 1.5}, {"h", 1.0 / 200}, {"ratio_lo", 3.0}, {"ratio_hi", 5.0},
              {"sweep_tol", 1e-12}, {"scan_n", 4}, {"scan_h", 1e-5}, {"scan_ks", {10.0, 100.0, 1000.0}},
              {"scan_variation", 0.25}, {"dirichlet_growth", 2.0}};
    case 11:
      return {{"h", 1e-3}, {"deltas", {0.2, 0.1, 0.05, 0.025}}, {"ratio_lo", 0.35}, {"ratio_hi", 0.65},
              {"floor", 0.5}};
    case 12:
      return {{"runs", Json::array({{{"command", "torsion"}, {"config", {{"h", 1.0 / 32}}}}})}};
    default:
      throw ConfigError("criterion", "no criterion " + std::to_string(n));
  }
}

const char* title(int n) {
  static const char* titles[] = {"",
                                 "Torsion oracle",
                                 "Eigenvalue oracle",
                                 "Exact discrete identities",
                                 "Zero-set catalog",
                                 "Exact localization",
                                 "Monotone scheme",
                                 "Weight construction",
                                 "Defect measure",
                                 "Brezis-Marcus constant",
                                 "Hardy family residuals",
                                 "Kato estimator",
                                 "Determinism"};
  return titles[n];
}

std::string tag(int n) {
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "c%02d", n);
  return buffer;
}

ScalarField solve_with(const SchroedingerOperator& op, const SpdFactorization& factor, const DiscreteMeasure& nu) {
  return op.scatter(factor.solve(op.load(nu)));
}

NodeMask complement_of(const NodeMask& mask) {
  NodeMask out(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k) out[k] = mask[k] ? 0 : 1;
  return out;
}

std::vector<std::size_t> active_nodes(const SchroedingerOperator& op) {
  return {op.active_nodes().begin(), op.active_nodes().end()};
}

// ---------------------------------------------------------------------------

void criterion_1(const Json& c, CriterionReport& r) {
  {
    const GridPtr g = Grid::build(DomainSpec::radial_ball(3, 1.0), num(c, "radial_h"));
    const ScalarField zeta = torsion(SchroedingerOperator::positive_part(evaluate(PotentialSpec::constant(0.0), g)));
    double err = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k) {
      err = std::max(err, std::abs(zeta[k] - oracle::torsion_ball(g->nodes()[k].x, 3, 1.0)));
    }
    r.checks.push_back(at_most("1a", err, num(c, "radial_tol"), "ball N=3: max |zeta1 - (1-r^2)/6|"));
  }
  {
    const GridPtr g = Grid::build(DomainSpec::rectangle(0, 1, 0, 1), num(c, "square_h"));
    const ScalarField zeta = torsion(SchroedingerOperator::positive_part(evaluate(PotentialSpec::constant(0.0), g)));
    const double center = zeta[g->nearest_node({0.5, 0.5})];
    const double series = oracle::torsion_rectangle({0, 1, 0, 1}, 0.5, 0.5, integer(c, "series_terms"));
    r.checks.push_back(within("1b", center, series, num(c, "square_tol"), "unit square center vs series"));
  }
}

void criterion_2(const Json& c, CriterionReport& r) {
  const GridPtr g = Grid::build(DomainSpec::rectangle(0, 1, 0, 1), num(c, "h"));
  const double lambda = rayleigh_lambda1(SchroedingerOperator::full(evaluate(PotentialSpec::constant(0.0), g))).lambda1;
  r.checks.push_back(at_most("2a", std::abs(lambda / (2 * pi * pi) - 1.0), num(c, "rel_tol"), "|lambda1/2pi^2 - 1|"));
  const double shift = num(c, "shift");
  const double shifted =
      rayleigh_lambda1(SchroedingerOperator::full(evaluate(PotentialSpec::constant(shift), g))).lambda1;
  r.checks.push_back(at_most("2b", std::abs(shifted - lambda - shift), num(c, "shift_tol"), "constant shift"));
}

void criterion_3(const Json& c, CriterionReport& r) {
  const GridPtr g = Grid::build(DomainSpec::rectangle(0, 1, 0, 1), num(c, "h"));
  const SplitPotential barrier = evaluate(PotentialSpec{HardyPoint{{0.3, 0.6}, 1.0}}, g);
  const SchroedingerOperator op = SchroedingerOperator::positive_part(barrier);
  const GreenSolver green(op);
  const auto nodes = active_nodes(op);
  const int trials = integer(c, "trials");
  std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  std::uint64_t seed = 1000;

  double reciprocity = 0.0;
  for (int t = 0; t < trials; ++t) {
    const ScalarField f = uniform_random_field(g, seed++);
    const ScalarField gg = uniform_random_field(g, seed++);
    reciprocity = std::max(reciprocity, reciprocity_check(op, f, gg, {SolverMethod::cholesky}));
  }
  r.checks.push_back(at_most("3a", reciprocity, num(c, "tol"), "reciprocity"));

  double symmetry = 0.0;
  for (int t = 0; t < trials; ++t) {
    const std::size_t x = nodes[pick(rng)], y = nodes[pick(rng)];
    const double a = green.column(x)[y], b = green.column(y)[x];
    symmetry = std::max(symmetry, std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}));
  }
  r.checks.push_back(at_most("3b", symmetry, num(c, "tol"), "Green symmetry"));

  double representation = 0.0;
  for (int t = 0; t < trials; ++t) {
    DiscreteMeasure nu = DiscreteMeasure::from_density(uniform_random_field(g, seed++));
    nu.atoms.push_back({nodes[pick(rng)], 0.5});
    const ScalarField u = green.solve(nu);
    const std::size_t x = nodes[pick(rng)];
    representation = std::max(representation, representation_check(op, u, nu, std::span<const std::size_t>(&x, 1)));
  }
  r.checks.push_back(at_most("3c", representation, num(c, "tol"), "representation formula"));

  const SplitPotential signed_v =
      evaluate(PotentialSpec::sum(PotentialSpec{HardyPoint{{0.3, 0.6}, 1.0}}, PotentialSpec::constant(-5.0)), g);
  const SchroedingerOperator full = SchroedingerOperator::full(signed_v);
  double identity = 0.0;
  for (int t = 0; t < trials; ++t) {
    ScalarField u = uniform_random_field(g, seed++);
    for (double& v : u.values()) v += 0.1;
    ScalarField xi = uniform_random_field(g, seed++);
    for (double& v : xi.values()) v -= 0.5;
    identity = std::max(identity, ground_state_identity(full, u, xi).relative_gap);
  }
  r.checks.push_back(at_most("3d", identity, num(c, "identity_tol"), "ground-state transform identity"));
}

void criterion_4(const Json& c, CriterionReport& r) {
  const double h = num(c, "h");
  const GridPtr g = Grid::build(DomainSpec::disk({0, 0}, 1.0), h);
  const auto run = [&](const PotentialSpec& v) {
    const SplitPotential split = evaluate(v, g);
    return decompose(torsion(SchroedingerOperator::positive_part(split)), split.hard_mask);
  };
  {
    const Point a{0.0, 0.0};
    const DecompositionResult d = run(PotentialSpec{HardyPoint{a, 1.0}});
    double reach = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k) {
      if (!d.s_nodes[k]) continue;
      const Node& n = g->nodes()[k];
      reach = std::max({reach, std::abs(n.x - a.x) / h, std::abs(n.y - a.y) / h});
    }
    r.checks.push_back(at_most("4a", d.s_size() == 0 ? 1e9 : reach, 1.0 + 1e-9, "hardy_point: S within one cell of a"));
    r.checks.push_back(within("4b", d.component_count, 1, 0, "hardy_point: components"));
  }
  const double rho = num(c, "omega_radius");
  {
    const DecompositionResult d = run(PotentialSpec{DistBoundarySq{{{0, 0}, rho}}});
    double one_side = 0.0;
    std::vector<Point> s_points;
    for (std::size_t k = 0; k < g->size(); ++k) {
      if (!d.s_nodes[k]) continue;
      const Node& n = g->nodes()[k];
      s_points.push_back({n.x, n.y});
      one_side = std::max(one_side, std::abs(std::hypot(n.x, n.y) - rho));
    }
    double other_side = 0.0;
    for (int t = 0; t < 720; ++t) {
      const double th = 2 * pi * t / 720.0;
      const Point q{rho * std::cos(th), rho * std::sin(th)};
      double best = 1e9;
      for (const Point& p : s_points) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
      other_side = std::max(other_side, best);
    }
    r.checks.push_back(at_most("4c", std::max(one_side, other_side) / h, 2.0, "dist_boundary_sq: Hausdorff(S, circle)/h"));
    r.checks.push_back(within("4d", d.component_count, 2, 0, "dist_boundary_sq: components"));
  }
  {
    const double rs = num(c, "set_radius");
    const DecompositionResult d = run(PotentialSpec{DistSetSq{{{0, 0}, rs}}});
    double missing = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k) {
      const Node& n = g->nodes()[k];
      if (std::hypot(n.x, n.y) <= rs - h && !d.s_nodes[k]) missing += 1.0;
    }
    r.checks.push_back(at_most("4e", missing, 0.0, "dist_set_sq: nodes of omega minus a collar outside S"));
  }
  {
    const DecompositionResult d = run(PotentialSpec{InversePowerAxis{1.5}});
    r.checks.push_back(within("4f", d.component_count, 2, 0, "inverse_power_axis 1.5: components"));
  }
  {
    const DecompositionResult d = run(PotentialSpec{InversePowerAxis{0.5}});
    r.checks.push_back(within("4g", static_cast<double>(d.s_size()), 0, 0, "inverse_power_axis 0.5: |S|"));
    r.checks.push_back(within("4h", d.component_count, 1, 0, "inverse_power_axis 0.5: components"));
  }
}

void criterion_5(const Json& c, CriterionReport& r) {
  const GridPtr g = Grid::build(DomainSpec::disk({0, 0}, 1.0), num(c, "h"));
  const std::vector<PotentialSpec> catalog = {
      {HardyPoint{{0.3, 0.2}, 1.0}},   {DistBoundarySq{{{0, 0}, 0.5}}}, {DistSetSq{{{0.2, 0.0}, 0.3}}},
      {InversePowerAxis{1.5}},         {InversePowerAxis{2.5}},         {BrezisMarcus{{{0, 0}, 0.5}}},
  };
  std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
  double worst = 0.0, reconstruction = 0.0;
  std::uint64_t seed = 2000;
  for (const PotentialSpec& v : catalog) {
    const SplitPotential split = evaluate(v, g);
    const DecompositionResult d =
        decompose(torsion(SchroedingerOperator::positive_part(split)), split.hard_mask);
    // Admissible fields vanish on all of S.
    const SchroedingerOperator op = SchroedingerOperator::positive_part(split).restricted(complement_of(d.s_nodes));
    const SpdFactorization factor(op.matrix());
    const auto nodes = active_nodes(op);
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    for (int t = 0; t < integer(c, "trials"); ++t) {
      DiscreteMeasure nu = DiscreteMeasure::from_density(uniform_random_field(g, seed++));
      nu.atoms.push_back({nodes[pick(rng)], 1.0});
      const ScalarField u = solve_with(op, factor, nu);
      const double scale = std::max(u.sup_abs(), 1e-300);
      ScalarField sum(g);
      for (int i = 0; i < d.component_count; ++i) {
        const ScalarField local = solve_with(op, factor, restrict_measure(nu, d.component_mask(i)));
        const ScalarField cut = cutoff(u, d, i);
        for (std::size_t k = 0; k < g->size(); ++k) {
          worst = std::max(worst, std::abs(local[k] - cut[k]) / scale);
          sum[k] += cut[k];
        }
      }
      for (std::size_t k = 0; k < g->size(); ++k) {
        const double on_s = d.s_nodes[k] ? u[k] : 0.0;
        reconstruction = std::max(reconstruction, std::abs(sum[k] + on_s - u[k]));
      }
    }
  }
  r.checks.push_back(at_most("5a", worst, num(c, "tol"), "solve(nu on D_i) vs cutoff(solve(nu), i)"));
  r.checks.push_back(at_most("5b", reconstruction, 0.0, "sum of cutoffs plus S part equals u"));
}

struct SchemeCase {
  const char* name;
  DomainSpec domain;
  bool radial;
  PotentialSpec potential;
  const char* density;
  bool with_atom;
};

void criterion_6(const Json& c, CriterionReport& r) {
  const DomainSpec disk = DomainSpec::disk({0, 0}, 1.0);
  const DomainSpec square = DomainSpec::rectangle(0, 1, 0, 1);
  const DomainSpec outer = DomainSpec::rectangle(-0.25, 1.25, -0.25, 1.25);
  const std::vector<SchemeCase> cases = {
      {"hardy_point", disk, false, {HardyPoint{{0, 0}, 1.0}}, "one", false},
      {"axis_1.5", disk, false, {InversePowerAxis{1.5}}, "random", false},
      {"dist_boundary_sq", disk, false, {DistBoundarySq{{{0, 0}, 0.5}}}, "one", false},
      {"dist_set_sq", disk, false, {DistSetSq{{{0.2, 0}, 0.3}}}, "random", true},
      {"brezis_marcus", outer, false, {BrezisMarcus{{{0.5, 0.5}, 0.5}}}, "one", false},
      {"hardy_signed_N3", DomainSpec::radial_ball(3, 1.0), true, {HardySigned{0.6}}, "one", false},
      {"constant_negative", square, false, PotentialSpec::constant(-5.0), "random", false},
      {"hardy_point_plus_negative", disk, false,
       PotentialSpec::sum(PotentialSpec{HardyPoint{{0, 0}, 1.0}}, PotentialSpec::constant(-3.0)), "one", true},
      {"inverse_power_radial", DomainSpec::radial_ball(3, 1.0), true, {InversePowerRadial{1.0}}, "one", false},
      {"hardy_signed_N5", DomainSpec::radial_ball(5, 1.0), true, {HardySigned{1.6}}, "random", false},
  };
  const double budget = num(c, "violation_budget");
  double monotone = 0.0, below_theta = 0.0, theta_below_u = 0.0, final_gap = 0.0, theta_negative = 0.0;
  std::size_t hypotheses = 0;
  std::uint64_t seed = c.at("seed").get<std::uint64_t>();
  for (const SchemeCase& sc : cases) {
    const GridPtr g = Grid::build(sc.domain, sc.radial ? num(c, "radial_h") : num(c, "planar_h"));
    const SplitPotential split = evaluate(sc.potential, g);
    DatumSpec datum{sc.density, 1.0, {}};
    if (sc.with_atom) datum.atoms.push_back({{-0.5, 0.1}, 0.05});
    const DiscreteMeasure mu = make_datum(datum, g, seed++);

    SchemeOptions scheme;
    scheme.n_max = static_cast<std::size_t>(integer(c, "n_max"));
    scheme.truncation_scale = 0.0;
    scheme.violation_budget = budget;
    const IterationTrace trace = monotone_scheme(split, mu, scheme);
    for (const IterationRow& row : trace.rows) {
      monotone = std::max(monotone, row.violation / std::max(row.sup_u, 1e-300));
    }
    if (trace.last.min() < 0.0) monotone = std::max(monotone, -trace.last.min() / trace.last.sup_abs());

    // Comparison with the component minimizer, where a supersolution is known.
    const DecompositionResult d = decompose(torsion(SchroedingerOperator::positive_part(split)), split.hard_mask);
    const NodeMask outside_s = complement_of(d.s_nodes);
    const SchroedingerOperator full = SchroedingerOperator::full(split).restricted(outside_s);
    const SpdFactorization full_factor(full.matrix());
    if (!full_factor.positive_definite()) continue;
    ++hypotheses;
    const ScalarField u = solve_with(full, full_factor, mu);
    const int i = [&] {
      int best = 0;
      std::size_t size = 0;
      for (int k = 0; k < d.component_count; ++k) {
        if (d.component_sizes[k] > size) best = k, size = d.component_sizes[k];
      }
      return best;
    }();
    const NodeMask mask = d.component_mask(i);
    const SchroedingerOperator plus = SchroedingerOperator::positive_part(split).restricted(outside_s);
    const SpdFactorization plus_factor(plus.matrix());
    const ScalarField z = solve_with(plus, plus_factor, restrict_measure(mu, mask));
    CalibrationOptions copts;
    copts.seed = seed++;
    const QFunction q = calibrate_Q(split, copts).q;
    const ScalarField weight = supersolution_weight(q.apply(z), u, mask);
    ScalarField h_datum = uniform_random_field(g, seed++);
    for (std::size_t k = 0; k < g->size(); ++k) h_datum[k] *= std::max(u[k], 0.0);
    const ScalarField theta = minimize_theta(split, d, i, weight, h_datum);

    ScalarField datum_field(g);
    for (std::size_t k = 0; k < g->size(); ++k) datum_field[k] = mask[k] ? weight[k] * h_datum[k] : 0.0;
    SchemeOptions bounded = scheme;
    bounded.region = mask;
    bounded.upper_bound = theta;
    const IterationTrace v = monotone_scheme(split, DiscreteMeasure::from_density(datum_field), bounded);
    for (const IterationRow& row : v.rows) {
      monotone = std::max(monotone, row.violation / std::max(row.sup_u, 1e-300));
    }
    below_theta = std::max(below_theta, v.upper_violation);
    const double scale = std::max(theta.sup_abs(), 1e-300);
    const double u_scale = std::max(u.sup_abs(), 1e-300);
    double gap = 0.0;
    for (std::size_t k = 0; k < g->size(); ++k) {
      gap = std::max(gap, std::abs(v.last[k] - theta[k]));
      if (mask[k]) theta_below_u = std::max(theta_below_u, (theta[k] - u[k]) / u_scale);
      theta_negative = std::max(theta_negative, -theta[k] / scale);
    }
    final_gap = std::max(final_gap, gap / scale);
  }
  r.checks.push_back(at_most("6a", monotone, budget, "0 <= u_n <= u_{n+1}: worst relative violation"));
  r.checks.push_back(within("6b", static_cast<double>(hypotheses), static_cast<double>(cases.size()), 0,
                            "pairs with a positive definite signed system"));
  r.checks.push_back(at_most("6c", below_theta, num(c, "upper_tol"), "u_n <= theta"));
  r.checks.push_back(at_most("6d", std::max(theta_below_u, theta_negative), num(c, "upper_tol"), "0 <= theta <= u"));
  r.checks.push_back(at_most("6e", final_gap, num(c, "final_tol"), "|u_n - theta| at termination"));
}

void criterion_7(const Json& c, CriterionReport& r) {
  {
    const GridPtr g = Grid::build(DomainSpec::radial_ball(3, 1.0), num(c, "radial_h"));
    const SplitPotential split = evaluate(PotentialSpec{HardySigned{num(c, "alpha")}}, g);
    const DecompositionResult d = decompose(torsion(SchroedingerOperator::positive_part(split)), split.hard_mask);
    const DiscreteMeasure mu = DiscreteMeasure::from_density(ScalarField::constant(g, 1.0));
    const int i = 0;
    const QFunction q = calibrate_Q(split).q;
    WeightOptions options;
    options.certify_tol = num(c, "certify_tol");
    const WeightResult w = build_weight(split, mu, d, i, q, options);
    r.checks.push_back(at_least("7a", w.certified_lambda, 1.0 - options.certify_tol, "hardy_signed: weighted Rayleigh"));
    const NodeMask mask = d.component_mask(i);
    double w_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < mask.size(); ++k) {
      if (mask[k]) w_min = std::min(w_min, w.weight[k]);
    }
    r.checks.push_back({"7b", w_min > 0.0, w_min, 0.0, 0.0, "min of w on D_i (must be > 0)"});
    const double unweighted = rayleigh_lambda1(SchroedingerOperator::full(split).restricted(mask)).lambda1;
    r.checks.push_back(at_least("7c", unweighted, -1e-8, "unweighted restricted form is nonnegative"));
  }
  {
    const GridPtr g = Grid::build(DomainSpec::rectangle(0, 1, 0, 1), num(c, "square_h"));
    const double l0 = rayleigh_lambda1(SchroedingerOperator::full(evaluate(PotentialSpec::constant(0.0), g))).lambda1;
    const SplitPotential split = evaluate(PotentialSpec::constant(-num(c, "factor") * l0), g);
    const DecompositionResult d = decompose(torsion(SchroedingerOperator::positive_part(split)), split.hard_mask);
    const WeightResult w = build_weight(split, DiscreteMeasure::from_density(ScalarField::constant(g, 1.0)), d, 0,
                                        calibrate_Q(split).q);
    const double energy = w.certificate ? SchroedingerOperator::full(split).energy(*w.certificate) : 0.0;
    r.checks.push_back(flag("7d", !w.certified, "lambda1 < 0: certification fails"));
    r.checks.push_back({"7e", w.certificate.has_value() && energy < 0.0, energy, 0.0, 0.0,
                        "certificate energy (must be < 0)"});
  }
}

void criterion_8(const Json& c, CriterionReport& r) {
  const std::vector<double> widths = c.at("widths").get<std::vector<double>>();
  const DomainSpec disk = DomainSpec::disk({0, 0}, 1.0);
  const auto center_density = [&](double alpha, double h, DefectEstimate& est) {
    const GridPtr g = Grid::build(disk, h);
    const SplitPotential split = evaluate(PotentialSpec{InversePowerAxis{alpha}}, g);
    const ScalarField zeta = torsion(SchroedingerOperator::positive_part(split));
    est = defect_estimate(zeta, decompose(zeta, split.hard_mask));
    const std::size_t center = g->nearest_node({0, 0});
    for (const SegmentDensity& s : est.densities) {
      if (s.node == center) return s.density;
    }
    throw PreconditionError("center node is not on the interface");
  };

  const double a1 = num(c, "stable_alpha"), a2 = num(c, "vanishing_alpha");
  std::vector<double> tau1, tau2;
  double comparison = 0.0;
  for (double h : widths) {
    DefectEstimate e1, e2;
    const double d1 = center_density(a1, h, e1);
    const double d2 = center_density(a2, h, e2);
    tau1.push_back(e1.tau_mass);
    tau2.push_back(e2.tau_mass);
    // The disk sits inside the slab, so the slab profile dominates at the same h.
    comparison = std::max(comparison, d1 / oracle::slab_defect_1d(a1, h).density - 1.0);
    comparison = std::max(comparison, d2 / oracle::slab_defect_1d(a2, h).density - 1.0);
  }
  const double lo = *std::min_element(tau1.begin(), tau1.end()), hi = *std::max_element(tau1.begin(), tau1.end());
  r.checks.push_back({"8a", lo > 0.0, lo, 0.0, 0.0, "alpha=1.5: smallest tau_mass (must be > 0)"});
  r.checks.push_back(at_most("8b", (hi - lo) / hi, num(c, "stable_tol"), "alpha=1.5: relative spread of tau_mass"));
  double worst_ratio = 0.0;
  for (std::size_t k = 1; k < tau2.size(); ++k) worst_ratio = std::max(worst_ratio, tau2[k] / tau2[k - 1]);
  r.checks.push_back(at_most("8c", worst_ratio, num(c, "shrink_ratio"), "alpha=2.5: tau_mass ratio per halving"));
  r.checks.push_back(at_most("8d", comparison, 1e-8, "center density <= 1D slab density at the same h"));
  const double oracle_h = num(c, "oracle_h");
  const double slab1 = oracle::slab_defect_1d(a1, oracle_h).density;
  const double slab2 = oracle::slab_defect_1d(a2, oracle_h).density;
  r.checks.push_back({"8e", slab1 > 0.0, slab1, 0.0, 0.0, "1D oracle alpha=1.5 at fine h (must be > 0)"});
  r.checks.push_back(at_most("8f", slab2, num(c, "oracle_vanishing_max"), "1D oracle alpha=2.5 at fine h"));
}

void criterion_9(const Json& c, CriterionReport& r) {
  const Disk omega{{0.5, 0.5}, 0.5};
  const GridPtr g = Grid::build(DomainSpec::rectangle(-0.25, 1.25, -0.25, 1.25).with_inner(omega), num(c, "h"));
  const SplitPotential split = evaluate(PotentialSpec{BrezisMarcus{omega}}, g);
  const DecompositionResult d = decompose(torsion(SchroedingerOperator::positive_part(split)), split.hard_mask);
  const int inside = d.labels[g->nearest_node(omega.center)];
  if (inside < 0) throw PreconditionError("center of omega fell into S");
  const NodeMask mask = d.component_mask(inside);
  const double lambda = rayleigh_lambda1(SchroedingerOperator::full(split), nullptr, &mask).lambda1;
  r.checks.push_back(at_least("9a", lambda, num(c, "bound"), "lambda1 on omega with the Brezis-Marcus potential"));
  r.checks.push_back(within("9b", d.component_count, 2, 0, "components"));
}

void criterion_10(const Json& c, CriterionReport& r) {
  const oracle::HardyFamily family{integer(c, "n"), num(c, "alpha"), num(c, "beta")};
  const double h = num(c, "h");
  const double ratio = oracle::radial_residual(family, h) / oracle::radial_residual(family, 0.5 * h);
  r.checks.push_back({"10a", ratio >= num(c, "ratio_lo") && ratio <= num(c, "ratio_hi"), ratio,
                      0.5 * (num(c, "ratio_lo") + num(c, "ratio_hi")), 0.5 * (num(c, "ratio_hi") - num(c, "ratio_lo")),
                      "radial residual ratio h vs h/2"});
  double f_min = std::numeric_limits<double>::infinity(), bound_gap = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 99; ++k) {
    const double rr = k / 100.0;
    const double f = oracle::f_alpha_beta(rr, family);
    f_min = std::min(f_min, f);
    bound_gap = std::max(bound_gap, (oracle::f_alpha_beta_lower_bound(rr, family) - f) / std::max(1.0, std::abs(f)));
  }
  r.checks.push_back({"10b", f_min > 0.0, f_min, 0.0, 0.0, "min f over the sweep (must be > 0)"});
  r.checks.push_back(at_most("10c", bound_gap, num(c, "sweep_tol"), "lower bound minus f over the sweep"));

  const int n = integer(c, "scan_n");
  const auto rows = oracle::truncation_energy_scan(n, 0.5 * (n - 2), c.at("scan_ks").get<std::vector<double>>(),
                                                   num(c, "scan_h"));
  double e_lo = rows.front().energy, e_hi = rows.front().energy, growth = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    e_lo = std::min(e_lo, rows[k].energy);
    e_hi = std::max(e_hi, rows[k].energy);
    if (k > 0) growth = std::min(growth, rows[k].dirichlet / rows[k - 1].dirichlet);
  }
  r.checks.push_back(at_most("10d", (e_hi - e_lo) / e_hi, num(c, "scan_variation"), "critical scan: energy spread"));
  r.checks.push_back(at_least("10e", growth, num(c, "dirichlet_growth"), "critical scan: Dirichlet growth per decade"));
}

void criterion_11(const Json& c, CriterionReport& r) {
  const GridPtr g = Grid::build(DomainSpec::radial_ball(3, 1.0), num(c, "h"));
  const std::vector<double> deltas = c.at("deltas").get<std::vector<double>>();
  const KatoReport b1 = kato_report(PotentialSpec{InversePowerRadial{1.0}}, g, deltas, 3);
  const KatoReport b2 = kato_report(PotentialSpec{InversePowerRadial{2.0}}, g, deltas, 3);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 1; k < b1.rows.size(); ++k) {
    const double ratio = b1.rows[k].eta / b1.rows[k - 1].eta;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double rlo = num(c, "ratio_lo"), rhi = num(c, "ratio_hi");
  r.checks.push_back({"11a", lo >= rlo && hi <= rhi, lo, 0.5 * (rlo + rhi), 0.5 * (rhi - rlo), "beta=1: smallest ratio"});
  r.checks.push_back({"11b", lo >= rlo && hi <= rhi, hi, 0.5 * (rlo + rhi), 0.5 * (rhi - rlo), "beta=1: largest ratio"});
  double floor = std::numeric_limits<double>::infinity();
  for (const KatoRow& row : b2.rows) floor = std::min(floor, row.eta / b2.rows.front().eta);
  r.checks.push_back(at_least("11c", floor, num(c, "floor"), "beta=2: eta / eta(first delta)"));
  r.checks.push_back(flag("11d", b1.vanishing && !b2.vanishing, "verdicts vanishing / not-vanishing"));
}

std::vector<std::pair<std::string, std::string>> tree_files(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> files;
  if (!fs::exists(root)) return files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files.emplace_back(fs::relative(entry.path(), root).generic_string(),
                       std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
  }
  std::sort(files.begin(), files.end());
  return files;
}

void criterion_12(const Json& c, CriterionReport& r, const fs::path& work_dir) {
  const Json& runs = c.at("runs");
  if (!runs.is_array() || runs.empty()) throw ConfigError("c12.runs", "expected a nonempty list of runs");
  const fs::path dirs[2] = {work_dir / "run_a", work_dir / "run_b"};
  for (const fs::path& dir : dirs) {
    fs::remove_all(dir);
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const std::string command = runs[k].at("command").get<std::string>();
      const RunConfig config = parse_config(runs[k].at("config"));
      run_command(command, config, (dir / (std::to_string(k) + "_" + command)).string());
    }
  }
  const auto a = tree_files(dirs[0]), b = tree_files(dirs[1]);
  double differing = a.size() == b.size() ? 0.0 : 1.0;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) differing += a[k] == b[k] ? 0.0 : 1.0;
  r.checks.push_back(at_least("12a", static_cast<double>(a.size()), 1.0, "artifact files written"));
  r.checks.push_back(at_most("12b", differing, 0.0, "files differing between two runs"));
}

}  // namespace

Json criterion_config(int number, const fs::path& config_dir,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
  Json merged = defaults(number);
  Json given = Json::object();
  const fs::path file = config_dir / (tag(number) + ".json");
  if (fs::exists(file)) given = read_json_file(file.string());
  for (const auto& [key, value] : overrides) apply_override(given, key, value);
  if (!given.is_object()) throw ConfigError(tag(number), "expected a JSON object");
  for (const auto& item : given.items()) {
    if (!merged.contains(item.key())) throw ConfigError(tag(number) + "." + item.key(), "unknown key");
    if (merged[item.key()].is_number() && !item.value().is_number()) {
      throw ConfigError(tag(number) + "." + item.key(), "expected a number");
    }
    merged[item.key()] = item.value();
  }
  return merged;
}

CriterionReport run_criterion(int number, const Json& config, const fs::path& work_dir) {
  CriterionReport report;
  report.number = number;
  report.title = title(number);
  try {
    switch (number) {
      case 1: criterion_1(config, report); break;
      case 2: criterion_2(config, report); break;
      case 3: criterion_3(config, report); break;
      case 4: criterion_4(config, report); break;
      case 5: criterion_5(config, report); break;
      case 6: criterion_6(config, report); break;
      case 7: criterion_7(config, report); break;
      case 8: criterion_8(config, report); break;
      case 9: criterion_9(config, report); break;
      case 10: criterion_10(config, report); break;
      case 11: criterion_11(config, report); break;
      case 12: criterion_12(config, report, work_dir); break;
      default: throw ConfigError("criterion", "no criterion " + std::to_string(number));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  return report;
}

io::CsvTable report_table(const std::vector<CriterionReport>& reports) {
  io::CsvTable table;
  table.header = {"criterion", "status", "value", "expected", "tolerance"};
  for (const CriterionReport& report : reports) {
    if (!report.error.empty()) {
      table.rows.push_back({std::to_string(report.number), "error", "nan", "nan", "nan"});
      continue;
    }
    for (const CheckRow& c : report.checks) {
      table.rows.push_back({c.id, c.pass ? "pass" : "fail", io::format_double(c.value), io::format_double(c.expected),
                            io::format_double(c.tolerance)});
    }
  }
  return table;
}

std::string summary_line(const CriterionReport& report) {
  std::ostringstream out;
  out << (report.pass() ? "PASS" : "FAIL") << "  criterion " << report.number << ": " << report.title;
  if (!report.error.empty()) {
    out << "  [error: " << report.error << "]";
    return out.str();
  }
  out << "  [";
  for (std::size_t k = 0; k < report.checks.size(); ++k) {
    const CheckRow& c = report.checks[k];
    if (k) out << "; ";
    out << c.id << (c.pass ? " ok " : " FAIL ") << c.note << " = " << io::format_double(c.value);
  }
  out << "]";
  return out.str();
}

}  // namespace torsionlab::cli
