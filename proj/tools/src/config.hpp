#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torsionlab/grid.hpp"
#include "torsionlab/io.hpp"
#include "torsionlab/iteration.hpp"
#include "torsionlab/potential.hpp"

namespace torsionlab::cli {

using io::Json;

struct AtomSpec {
  Point point;
  double mass = 1.0;
};

/// Datum: a density from a fixed catalog times `scale`, plus point masses at the nearest nodes.
struct DatumSpec {
  std::string density = "one";  // zero | one | random
  double scale = 1.0;
  std::vector<AtomSpec> atoms;
};

struct RunConfig {
  DomainSpec domain = DomainSpec::rectangle(0.0, 1.0, 0.0, 1.0);
  double h = 1.0 / 64.0;
  PotentialSpec potential = PotentialSpec::constant(0.0);
  EvaluateOptions evaluate;
  double theta_rel = 1e-3;
  CalibrationOptions q;
  SchemeOptions scheme;
  WeightOptions weight;
  DatumSpec datum;
  /// Component used by weight / iterate; -1 picks the component with the most datum mass.
  int component = -1;
  std::vector<double> kato_deltas{0.2, 0.1, 0.05, 0.025};
  double kato_fraction = 0.2;
  std::vector<double> defect_widths{1.0 / 64, 1.0 / 128, 1.0 / 256};
  std::vector<Point> green_points;
  int oracle_n = 5;
  double oracle_alpha = 2.5;
  double oracle_beta = 1.5;
  std::size_t oracle_points = 99;
  std::string out;
  int workers = 1;
  std::uint64_t seed = 42;

  /// Canonical document after overrides; hashed into every summary.
  Json source;
};

/// Throws ConfigError naming the offending key (unknown keys included).
RunConfig parse_config(const Json& document);
PotentialSpec parse_potential(const Json& node, const std::string& path);
DomainSpec parse_domain(const Json& node, const std::string& path);

/// Sets a dotted key ("scheme.n_max") to a value parsed as JSON, or as a string when it is not JSON.
void apply_override(Json& document, const std::string& dotted_key, const std::string& value);

Json read_json_file(const std::string& path);

/// FNV-1a 64 of the compact canonical dump, as 16 hex digits.
std::string config_hash(const Json& document);

/// Rejects keys outside `allowed` with a ConfigError naming path.key.
void check_keys(const Json& node, const std::string& path, std::initializer_list<const char*> allowed);

}  // namespace torsionlab::cli
