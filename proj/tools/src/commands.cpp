#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>

#include "torsionlab/decomposition.hpp"
#include "torsionlab/error.hpp"
#include "torsionlab/integrals.hpp"
#include "torsionlab/io.hpp"
#include "torsionlab/iteration.hpp"
#include "torsionlab/oracle.hpp"
#include "torsionlab/variational.hpp"

namespace torsionlab::cli {

namespace {

using io::CsvTable;
using io::format_double;

struct Context {
  const RunConfig& config;
  io::ArtifactWriter writer;
  GridPtr grid;
  SplitPotential split;
  Json summary;
  std::vector<std::string> stages;

  Context(const std::string& command, const RunConfig& c, const std::string& out_dir)
      : config(c), writer(out_dir) {
    grid = Grid::build(c.domain, c.h);
    split = evaluate(c.potential, grid, c.evaluate);
    summary["command"] = command;
    summary["config_hash"] = config_hash(c.source);
    Json stats = io::grid_descriptor(*grid);
    stats["hard_count"] = split.hard_count();
    stats["potential"] = c.potential.name();
    summary["grid"] = stats;
    stages.push_back("evaluate");
  }

  bool planar() const { return grid->mode() == GridMode::planar; }

  void field(const std::string& stem, const ScalarField& f, bool image = true) {
    writer.write_csv(stem + ".csv", io::field_table(f));
    if (image && planar()) writer.write_pgm(stem + ".pgm", io::heatmap(f));
  }
};

bool potential_is_zero(const PotentialSpec& spec) {
  const auto* c = std::get_if<ConstantPotential>(&spec.kind);
  return c && c->value == 0.0;
}

DecompositionResult decomposition_of(Context& ctx, ScalarField* zeta_out = nullptr) {
  const ScalarField zeta = torsion(SchroedingerOperator::positive_part(ctx.split));
  if (zeta_out) *zeta_out = zeta;
  ctx.stages.push_back("torsion");
  ctx.stages.push_back("decompose");
  return decompose(zeta, ctx.split.hard_mask, ctx.config.theta_rel);
}

int pick_component(const RunConfig& config, const DecompositionResult& dec, const DiscreteMeasure& mu) {
  if (config.component >= 0) {
    if (config.component >= dec.component_count) throw ConfigError("component", "no such component");
    return config.component;
  }
  std::vector<double> mass(static_cast<std::size_t>(dec.component_count), 0.0);
  const auto weights = dec.grid->quad_weights();
  for (std::size_t k = 0; k < dec.labels.size(); ++k) {
    if (dec.labels[k] >= 0) mass[static_cast<std::size_t>(dec.labels[k])] += weights[k] * mu.density[k];
  }
  for (const Atom& a : mu.atoms) {
    if (dec.labels[a.node] >= 0) mass[static_cast<std::size_t>(dec.labels[a.node])] += a.mass;
  }
  if (mass.empty()) throw PreconditionError("no components");
  return static_cast<int>(std::max_element(mass.begin(), mass.end()) - mass.begin());
}

Point domain_center(const DomainSpec& spec) {
  if (const auto* r = std::get_if<Rectangle>(&spec.shape)) return {0.5 * (r->x0 + r->x1), 0.5 * (r->y0 + r->y1)};
  if (const auto* d = std::get_if<Disk>(&spec.shape)) return d->center;
  return {0.0, 0.0};
}

int cmd_torsion(Context& ctx) {
  SolveStats stats;
  const ScalarField zeta = torsion(SchroedingerOperator::positive_part(ctx.split), {}, &stats);
  ctx.stages.push_back("torsion");
  ctx.field("torsion", zeta);
  Json r = {{"max", zeta.max()},
            {"integral", integrate(*ctx.grid, zeta)},
            {"solver_iterations", stats.iterations},
            {"solver_residual", stats.residual}};
  if (potential_is_zero(ctx.config.potential)) {
    double worst = 0.0;
    for (std::size_t k = 0; k < zeta.size(); ++k) {
      const Node& n = ctx.grid->nodes()[k];
      worst = std::max(worst, std::abs(zeta[k] - oracle::torsion_exact(ctx.config.domain, {n.x, n.y})));
    }
    r["oracle_max_error"] = worst;
  }
  ctx.summary["result"] = r;
  return exit_ok;
}

int cmd_zeroset(Context& ctx) {
  const ScalarField zeta = torsion(SchroedingerOperator::positive_part(ctx.split));
  ctx.stages.push_back("torsion");
  const DecompositionResult s = detect_S(zeta, ctx.split.hard_mask, ctx.config.theta_rel);
  ctx.stages.push_back("detect_S");
  ScalarField indicator(ctx.grid);
  for (std::size_t k = 0; k < indicator.size(); ++k) indicator[k] = s.s_nodes[k] ? 1.0 : 0.0;
  ctx.field("s_mask", indicator);
  ctx.summary["result"] = {{"S_size", s.s_size()}, {"hard_count", ctx.split.hard_count()}, {"threshold", s.threshold}};
  return exit_ok;
}

int cmd_decompose(Context& ctx) {
  const DecompositionResult dec = decomposition_of(ctx);
  if (ctx.planar()) ctx.writer.write_pgm("labels.pgm", io::label_image(dec));
  ScalarField labels(ctx.grid);
  for (std::size_t k = 0; k < labels.size(); ++k) labels[k] = dec.labels[k];
  ctx.writer.write_csv("labels.csv", io::field_table(labels));
  Json r = {{"component_count", dec.component_count},
            {"S_size", dec.s_size()},
            {"component_sizes", dec.component_sizes},
            {"threshold", dec.threshold}};
  // Spurious disconnections from the threshold tier show up as a count change at h/2.
  try {
    const GridPtr fine = Grid::build(ctx.config.domain, 0.5 * ctx.config.h);
    const SplitPotential split = evaluate(ctx.config.potential, fine, ctx.config.evaluate);
    const ScalarField zeta = torsion(SchroedingerOperator::positive_part(split));
    r["component_count_half_h"] = decompose(zeta, split.hard_mask, ctx.config.theta_rel).component_count;
  } catch (const Error& e) {
    r["component_count_half_h"] = nullptr;
  }
  ctx.summary["result"] = r;
  return exit_ok;
}

int cmd_green(Context& ctx) {
  const SchroedingerOperator op = SchroedingerOperator::positive_part(ctx.split);
  const GreenSolver solver(op);
  std::vector<Point> points = ctx.config.green_points;
  if (points.empty()) points.push_back(domain_center(ctx.config.domain));
  std::vector<std::size_t> nodes;
  for (const Point& p : points) {
    const std::size_t node = ctx.grid->nearest_node(p);
    if (!op.is_active(node)) throw PreconditionError("green point sits on a hard node");
    nodes.push_back(node);
  }
  std::vector<ScalarField> columns(nodes.size());
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(ctx.config.workers), nodes.size());
  if (workers <= 1) {
    for (std::size_t c = 0; c < nodes.size(); ++c) columns[c] = solver.column(nodes[c]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < nodes.size(); c += workers) columns[c] = solver.column(nodes[c]);
      });
    }
    for (auto& t : pool) t.join();
  }
  ctx.stages.push_back("green");
  double asym = 0.0, scale = 0.0;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    ctx.field("green_" + std::to_string(a), columns[a]);
    scale = std::max(scale, columns[a].sup_abs());
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      asym = std::max(asym, std::abs(columns[a][nodes[b]] - columns[b][nodes[a]]));
    }
  }
  ctx.summary["result"] = {{"columns", nodes.size()}, {"symmetry_gap", scale > 0.0 ? asym / scale : 0.0}};
  return exit_ok;
}

Json spectral_json(const SpectralResult& s) {
  return {{"lambda1", s.lambda1},
          {"residual", s.residual},
          {"iterations", s.iterations},
          {"factorizations", s.factorizations},
          {"bounded_below", s.bounded_below}};
}

int cmd_eigen(Context& ctx) {
  const SpectralResult s = rayleigh_lambda1(SchroedingerOperator::full(ctx.split));
  ctx.stages.push_back("eigen");
  ctx.field("eigenfield", s.eigenfield);
  Json r = spectral_json(s);
  r["verdicts"] = {{"form_nonnegative", s.lambda1 >= 0.0}};
  ctx.summary["result"] = r;
  return exit_ok;
}

int cmd_poincare(Context& ctx) {
  const DecompositionResult dec = decomposition_of(ctx);
  const SchroedingerOperator full = SchroedingerOperator::full(ctx.split);
  CsvTable table;
  table.header = {"component", "lambda1", "psd", "witness_certified"};
  Json rows = Json::array();
  bool all_ok = true;
  for (int i = 0; i < dec.component_count; ++i) {
    const SchroedingerOperator restricted = full.restricted(dec.component_mask(i));
    const AapReport aap = aap_check(restricted);
    const bool psd = aap.lambda1 >= -1e-8 * std::max(1.0, std::abs(aap.lambda1));
    all_ok = all_ok && psd && aap.agree;
    table.add_row({std::to_string(i), format_double(aap.lambda1), psd ? "1" : "0", aap.witness_certified ? "1" : "0"});
    rows.push_back({{"component", i},
                    {"lambda1", aap.lambda1},
                    {"psd", psd},
                    {"witness_certified", aap.witness_certified},
                    {"agree", aap.agree}});
  }
  ctx.stages.push_back("poincare");
  ctx.writer.write_csv("poincare.csv", table);
  ctx.summary["result"] = {{"components", rows}, {"component_count", dec.component_count}, {"all_certified", all_ok}};
  return all_ok ? exit_ok : exit_certification;
}

CsvTable trace_table(const IterationTrace& trace) {
  CsvTable table;
  table.header = {"n", "sup_u", "increment", "monotone_ok"};
  for (const IterationRow& r : trace.rows) {
    table.rows.push_back({std::to_string(r.n), format_double(r.sup_u), format_double(r.increment), r.monotone_ok ? "1" : "0"});
  }
  return table;
}

int cmd_iterate(Context& ctx) {
  const DiscreteMeasure mu = make_datum(ctx.config.datum, ctx.grid, ctx.config.seed);
  const IterationTrace trace = monotone_scheme(ctx.split, mu, ctx.config.scheme);
  ctx.stages.push_back("monotone_scheme");
  ctx.writer.write_csv("trace.csv", trace_table(trace));
  ctx.field("u_last", trace.last);
  double worst = 0.0;
  for (const IterationRow& r : trace.rows) worst = std::max(worst, r.violation);
  ctx.summary["result"] = {{"converged", trace.converged},
                           {"diverged", trace.diverged},
                           {"steps", trace.rows.size()},
                           {"sup_u", trace.rows.empty() ? 0.0 : trace.rows.back().sup_u},
                           {"max_violation", worst}};
  return exit_ok;
}

int cmd_weight(Context& ctx) {
  const DecompositionResult dec = decomposition_of(ctx);
  const DiscreteMeasure mu = make_datum(ctx.config.datum, ctx.grid, ctx.config.seed);
  const int i = pick_component(ctx.config, dec, mu);
  const Calibration cal = calibrate_Q(ctx.split, ctx.config.q);
  ctx.stages.push_back("calibrate_Q");
  const WeightResult w = build_weight(ctx.split, mu, dec, i, cal.q, ctx.config.weight);
  ctx.stages.push_back("build_weight");
  ctx.field("z", w.z);
  ctx.field("u_tilde", w.u_tilde);
  ctx.field("weight", w.weight);
  ctx.writer.write_csv("trace.csv", trace_table(w.trace));
  if (w.certificate) ctx.field("certificate", *w.certificate);
  ctx.summary["result"] = {{"component", i},
                           {"certified_lambda", w.certified_lambda},
                           {"certified", w.certified},
                           {"C", w.q.c},
                           {"alpha", w.q.alpha},
                           {"polished", w.polished},
                           {"scheme_gap", w.scheme_gap}};
  return w.certified ? exit_ok : exit_certification;
}

int cmd_kato(Context& ctx) {
  const KatoReport report = kato_report(ctx.config.potential, ctx.grid, ctx.config.kato_deltas, ctx.grid->dimension(),
                                        ctx.config.kato_fraction, ctx.config.evaluate);
  ctx.stages.push_back("kato");
  CsvTable table;
  table.header = {"delta", "eta"};
  Json rows = Json::array();
  for (const KatoRow& r : report.rows) {
    table.rows.push_back({format_double(r.delta), format_double(r.eta)});
    rows.push_back({{"delta", r.delta}, {"eta", r.eta}});
  }
  ctx.writer.write_csv("kato.csv", table);
  ctx.summary["result"] = {{"rows", rows}, {"verdict", report.vanishing ? "vanishing" : "not-vanishing"}};
  return exit_ok;
}

int cmd_oracle(Context& ctx) {
  const oracle::HardyFamily family{ctx.config.oracle_n, ctx.config.oracle_alpha, ctx.config.oracle_beta};
  family.validate();
  CsvTable table;
  table.header = {"r", "u", "V", "f"};
  double f_min = std::numeric_limits<double>::infinity();
  bool bound_ok = true;
  const std::size_t points = ctx.config.oracle_points;
  for (std::size_t k = 1; k <= points; ++k) {
    const double r = static_cast<double>(k) / static_cast<double>(points + 1);
    const double f = oracle::f_alpha_beta(r, family);
    f_min = std::min(f_min, f);
    bound_ok = bound_ok && f >= oracle::f_alpha_beta_lower_bound(r, family) - 1e-12 * std::max(1.0, std::abs(f));
    table.rows.push_back({format_double(r), format_double(oracle::u_alpha(r, family.beta)),
                          format_double(oracle::v_alpha(r, family.n, family.alpha)), format_double(f)});
  }
  ctx.writer.write_csv("oracle.csv", table);
  const double res_h = oracle::radial_residual(family, ctx.config.h);
  const double res_h2 = oracle::radial_residual(family, 0.5 * ctx.config.h);
  ctx.stages.push_back("oracle");
  ctx.summary["result"] = {{"f_min", f_min},
                           {"lower_bound_holds", bound_ok},
                           {"residual_h", res_h},
                           {"residual_h2", res_h2},
                           {"residual_ratio", res_h / res_h2}};
  return exit_ok;
}

int cmd_defect(Context& ctx) {
  DefectRunOptions options;
  options.evaluate = ctx.config.evaluate;
  options.theta_rel = ctx.config.theta_rel;
  const DefectEstimate estimate =
      defect_refinement(ctx.config.domain, ctx.config.potential, ctx.config.defect_widths, options);
  ctx.stages.push_back("defect_refinement");
  CsvTable trace;
  trace.header = {"h", "tau_mass", "component_count"};
  for (const RefinementRow& r : estimate.trace) {
    trace.rows.push_back({format_double(r.h), format_double(r.tau_mass), std::to_string(r.component_count)});
  }
  ctx.writer.write_csv("defect_trace.csv", trace);
  const GridPtr finest = Grid::build(ctx.config.domain, ctx.config.defect_widths.back());
  CsvTable densities;
  densities.header = {"x", "y", "density"};
  for (const SegmentDensity& d : estimate.densities) {
    const Node& n = finest->nodes()[d.node];
    densities.rows.push_back({format_double(n.x), format_double(n.y), format_double(d.density)});
  }
  ctx.writer.write_csv("defect_densities.csv", densities);
  Json r = {{"applicable", estimate.applicable}, {"tau_mass", estimate.tau_mass}};
  if (const auto* axis = std::get_if<InversePowerAxis>(&ctx.config.potential.kind)) {
    Json slab = Json::array();
    for (const RefinementRow& row : estimate.trace) {
      slab.push_back({{"h", row.h}, {"density", oracle::slab_defect_1d(axis->alpha, row.h).density}});
    }
    r["slab_oracle"] = slab;
  }
  ctx.summary["result"] = r;
  return exit_ok;
}

using Handler = int (*)(Context&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"torsion", cmd_torsion}, {"zeroset", cmd_zeroset}, {"decompose", cmd_decompose}, {"green", cmd_green},
      {"eigen", cmd_eigen},     {"poincare", cmd_poincare}, {"iterate", cmd_iterate}, {"weight", cmd_weight},
      {"kato", cmd_kato},       {"oracle", cmd_oracle},   {"defect", cmd_defect}};
  return table;
}

}  // namespace

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> list = {
      {"torsion", "torsion function of -Laplace + V+ (datum 1)"},
      {"zeroset", "zero set S: hard nodes plus the torsion threshold"},
      {"decompose", "connected components D_i of the complement of S"},
      {"green", "Green columns at configured points, with the symmetry gap"},
      {"eigen", "smallest eigenvalue of -Laplace + V"},
      {"poincare", "per-component nonnegativity of the form, with supersolution witnesses"},
      {"iterate", "monotone truncation scheme for the configured datum"},
      {"weight", "positive Poincare weight on a component, with Rayleigh certification"},
      {"kato", "Kato modulus eta(delta) over the configured radii"},
      {"oracle", "closed-form Hardy family sweep and radial residuals"},
      {"defect", "defect mass carried by S under mesh refinement"},
      {"verify-all", "run the acceptance suite over a config directory"},
  };
  return list;
}

DiscreteMeasure make_datum(const DatumSpec& spec, const GridPtr& grid, std::uint64_t seed) {
  ScalarField density(grid);
  if (spec.density == "one") {
    density = ScalarField::constant(grid, spec.scale);
  } else if (spec.density == "random") {
    density = uniform_random_field(grid, seed);
    for (double& v : density.values()) v *= spec.scale;
  }
  DiscreteMeasure mu = DiscreteMeasure::from_density(density);
  for (const AtomSpec& a : spec.atoms) mu.atoms.push_back({grid->nearest_node(a.point), a.mass});
  return mu;
}

int run_command(const std::string& name, const RunConfig& config, const std::string& out_dir,
                const CommandOptions& options) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) throw ConfigError("command", "unknown command '" + name + "'");
  const auto start = std::chrono::steady_clock::now();
  Context ctx(name, config, out_dir);
  const int code = it->second(ctx);
  Json timings = {{"stages", ctx.stages}};
  if (options.wall_time) {
    timings["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  ctx.summary["timings"] = timings;
  ctx.summary["exit_code"] = code;
  ctx.writer.write_json("summary.json", ctx.summary);
  return code;
}

}  // namespace torsionlab::cli
