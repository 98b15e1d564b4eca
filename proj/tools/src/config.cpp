#include "config.hpp"

#include <cstdio>
#include <fstream>

#include "torsionlab/error.hpp"

namespace torsionlab::cli {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double number(const Json& node, const std::string& key, const std::string& path, double fallback) {
  if (!node.contains(key)) return fallback;
  const Json& v = node.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

double required_number(const Json& node, const std::string& key, const std::string& path) {
  if (!node.contains(key)) throw ConfigError(join(path, key), "missing required key");
  return number(node, key, path, 0.0);
}

long long integer(const Json& node, const std::string& key, const std::string& path, long long fallback) {
  if (!node.contains(key)) return fallback;
  const Json& v = node.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<long long>();
}

bool boolean(const Json& node, const std::string& key, const std::string& path, bool fallback) {
  if (!node.contains(key)) return fallback;
  const Json& v = node.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

const Json& object(const Json& node, const std::string& key, const std::string& path) {
  const Json& v = node.at(key);
  if (!v.is_object()) throw ConfigError(join(path, key), "expected an object");
  return v;
}

Point point(const Json& node, const std::string& path) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    throw ConfigError(path, "expected a point [x, y]");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

Point point_or(const Json& node, const std::string& key, const std::string& path, Point fallback) {
  return node.contains(key) ? point(node.at(key), join(path, key)) : fallback;
}

Disk disk(const Json& node, const std::string& path) {
  if (!node.is_object()) throw ConfigError(path, "expected a disk {center, radius}");
  check_keys(node, path, {"center", "radius"});
  return {point_or(node, "center", path, {0.0, 0.0}), required_number(node, "radius", path)};
}

std::vector<double> number_list(const Json& node, const std::string& key, const std::string& path,
                                std::vector<double> fallback) {
  if (!node.contains(key)) return fallback;
  const Json& v = node.at(key);
  if (!v.is_array()) throw ConfigError(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) throw ConfigError(join(path, key), "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string type_of(const Json& node, const std::string& path) {
  if (!node.is_object()) throw ConfigError(path, "expected an object");
  if (!node.contains("type") || !node.at("type").is_string()) throw ConfigError(join(path, "type"), "missing type");
  return node.at("type").get<std::string>();
}

}  // namespace

void check_keys(const Json& node, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& item : node.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError(join(path, item.key()), "unknown key");
  }
}

DomainSpec parse_domain(const Json& node, const std::string& path) {
  const std::string type = type_of(node, path);
  DomainSpec spec;
  if (type == "rectangle") {
    check_keys(node, path, {"type", "x0", "x1", "y0", "y1", "inner_region"});
    spec = DomainSpec::rectangle(number(node, "x0", path, 0.0), number(node, "x1", path, 1.0),
                                 number(node, "y0", path, 0.0), number(node, "y1", path, 1.0));
  } else if (type == "disk") {
    check_keys(node, path, {"type", "center", "radius", "inner_region"});
    spec = DomainSpec::disk(point_or(node, "center", path, {0.0, 0.0}), number(node, "radius", path, 1.0));
  } else if (type == "radial_ball") {
    check_keys(node, path, {"type", "dimension", "radius", "include_origin"});
    spec = DomainSpec::radial_ball(static_cast<int>(integer(node, "dimension", path, 3)),
                                   number(node, "radius", path, 1.0), boolean(node, "include_origin", path, false));
  } else {
    throw ConfigError(join(path, "type"), "unknown domain type '" + type + "'");
  }
  if (node.contains("inner_region")) spec.inner_region = disk(node.at("inner_region"), join(path, "inner_region"));
  return spec;
}

PotentialSpec parse_potential(const Json& node, const std::string& path) {
  const std::string type = type_of(node, path);
  if (type == "hardy_point") {
    check_keys(node, path, {"type", "a", "kappa"});
    return {HardyPoint{point_or(node, "a", path, {0.0, 0.0}), number(node, "kappa", path, 1.0)}};
  }
  if (type == "inverse_power_axis") {
    check_keys(node, path, {"type", "alpha"});
    return {InversePowerAxis{required_number(node, "alpha", path)}};
  }
  if (type == "dist_boundary_sq" || type == "dist_set_sq" || type == "brezis_marcus") {
    check_keys(node, path, {"type", "omega"});
    if (!node.contains("omega")) throw ConfigError(join(path, "omega"), "missing required key");
    const Disk omega = disk(node.at("omega"), join(path, "omega"));
    if (type == "dist_boundary_sq") return {DistBoundarySq{omega}};
    if (type == "dist_set_sq") return {DistSetSq{omega}};
    return {BrezisMarcus{omega}};
  }
  if (type == "hardy_signed") {
    check_keys(node, path, {"type", "alpha"});
    return {HardySigned{required_number(node, "alpha", path)}};
  }
  if (type == "inverse_power_radial") {
    check_keys(node, path, {"type", "beta"});
    return {InversePowerRadial{required_number(node, "beta", path)}};
  }
  if (type == "constant") {
    check_keys(node, path, {"type", "value"});
    return PotentialSpec::constant(number(node, "value", path, 0.0));
  }
  if (type == "sum") {
    check_keys(node, path, {"type", "terms"});
    if (!node.contains("terms") || !node.at("terms").is_array() || node.at("terms").empty()) {
      throw ConfigError(join(path, "terms"), "expected a nonempty array of potentials");
    }
    PotentialSum sum;
    for (std::size_t i = 0; i < node.at("terms").size(); ++i) {
      sum.terms.push_back(parse_potential(node.at("terms")[i], join(path, "terms") + "[" + std::to_string(i) + "]"));
    }
    return {sum};
  }
  throw ConfigError(join(path, "type"), "unknown potential type '" + type + "'");
}

RunConfig parse_config(const Json& document) {
  if (!document.is_object()) throw ConfigError("", "config must be a JSON object");
  check_keys(document, "",
             {"domain", "h", "potential", "clip", "subsamples", "theta_rel", "q", "scheme", "weight", "datum",
              "component", "kato", "defect", "green", "oracle", "out", "workers", "seed"});
  RunConfig c;
  c.source = document;
  if (document.contains("domain")) c.domain = parse_domain(document.at("domain"), "domain");
  c.h = number(document, "h", "", c.h);
  if (document.contains("potential")) c.potential = parse_potential(document.at("potential"), "potential");
  c.evaluate.clip = number(document, "clip", "", c.evaluate.clip);
  c.evaluate.subsamples = static_cast<int>(integer(document, "subsamples", "", c.evaluate.subsamples));
  c.theta_rel = number(document, "theta_rel", "", c.theta_rel);
  c.seed = static_cast<std::uint64_t>(integer(document, "seed", "", 42));
  c.q.seed = c.seed;
  c.workers = static_cast<int>(integer(document, "workers", "", 1));
  if (c.workers < 1) throw ConfigError("workers", "must be at least 1");
  c.component = static_cast<int>(integer(document, "component", "", -1));
  if (document.contains("out")) {
    if (!document.at("out").is_string()) throw ConfigError("out", "expected a string");
    c.out = document.at("out").get<std::string>();
  }
  if (document.contains("q")) {
    const Json& q = object(document, "q", "");
    check_keys(q, "q", {"alpha", "probe_count", "tol"});
    c.q.alpha = number(q, "alpha", "q", c.q.alpha);
    c.q.probe_count = static_cast<std::size_t>(integer(q, "probe_count", "q", 3));
    c.q.tol = number(q, "tol", "q", c.q.tol);
  }
  if (document.contains("scheme")) {
    const Json& s = object(document, "scheme", "");
    check_keys(s, "scheme", {"n_max", "tol", "truncation_scale"});
    const long long n_max = integer(s, "n_max", "scheme", 200);
    if (n_max < 1) throw ConfigError("scheme.n_max", "must be positive");
    c.scheme.n_max = static_cast<std::size_t>(n_max);
    c.scheme.tol = number(s, "tol", "scheme", c.scheme.tol);
    c.scheme.truncation_scale = number(s, "truncation_scale", "scheme", c.scheme.truncation_scale);
  }
  if (document.contains("weight")) {
    const Json& w = object(document, "weight", "");
    check_keys(w, "weight", {"w_cap", "certify_tol", "eps_rel"});
    c.weight.w_cap = number(w, "w_cap", "weight", c.weight.w_cap);
    c.weight.certify_tol = number(w, "certify_tol", "weight", c.weight.certify_tol);
    c.weight.eps_rel = number(w, "eps_rel", "weight", c.weight.eps_rel);
  }
  c.weight.scheme = c.scheme;
  if (document.contains("datum")) {
    const Json& d = object(document, "datum", "");
    check_keys(d, "datum", {"density", "scale", "atoms"});
    if (d.contains("density")) {
      if (!d.at("density").is_string()) throw ConfigError("datum.density", "expected a string");
      c.datum.density = d.at("density").get<std::string>();
      if (c.datum.density != "zero" && c.datum.density != "one" && c.datum.density != "random") {
        throw ConfigError("datum.density", "unknown density '" + c.datum.density + "' (zero, one, random)");
      }
    }
    c.datum.scale = number(d, "scale", "datum", 1.0);
    if (d.contains("atoms")) {
      if (!d.at("atoms").is_array()) throw ConfigError("datum.atoms", "expected an array");
      for (std::size_t i = 0; i < d.at("atoms").size(); ++i) {
        const std::string p = "datum.atoms[" + std::to_string(i) + "]";
        const Json& a = d.at("atoms")[i];
        if (!a.is_object()) throw ConfigError(p, "expected an object {point, mass}");
        check_keys(a, p, {"point", "mass"});
        if (!a.contains("point")) throw ConfigError(p + ".point", "missing required key");
        c.datum.atoms.push_back({point(a.at("point"), p + ".point"), number(a, "mass", p, 1.0)});
      }
    }
  }
  if (document.contains("kato")) {
    const Json& k = object(document, "kato", "");
    check_keys(k, "kato", {"deltas", "fraction"});
    c.kato_deltas = number_list(k, "deltas", "kato", c.kato_deltas);
    c.kato_fraction = number(k, "fraction", "kato", c.kato_fraction);
  }
  if (document.contains("defect")) {
    const Json& d = object(document, "defect", "");
    check_keys(d, "defect", {"widths"});
    c.defect_widths = number_list(d, "widths", "defect", c.defect_widths);
  }
  if (document.contains("green")) {
    const Json& g = object(document, "green", "");
    check_keys(g, "green", {"points"});
    if (g.contains("points")) {
      if (!g.at("points").is_array()) throw ConfigError("green.points", "expected an array of points");
      for (std::size_t i = 0; i < g.at("points").size(); ++i) {
        c.green_points.push_back(point(g.at("points")[i], "green.points[" + std::to_string(i) + "]"));
      }
    }
  }
  if (document.contains("oracle")) {
    const Json& o = object(document, "oracle", "");
    check_keys(o, "oracle", {"n", "alpha", "beta", "points"});
    c.oracle_n = static_cast<int>(integer(o, "n", "oracle", c.oracle_n));
    c.oracle_alpha = number(o, "alpha", "oracle", c.oracle_alpha);
    c.oracle_beta = number(o, "beta", "oracle", c.oracle_beta);
    c.oracle_points = static_cast<std::size_t>(integer(o, "points", "oracle", 99));
  }
  if (!(c.h > 0.0)) throw ConfigError("h", "must be positive");
  if (!(c.theta_rel > 0.0 && c.theta_rel < 1.0)) throw ConfigError("theta_rel", "must lie in (0, 1)");
  return c;
}

void apply_override(Json& document, const std::string& dotted_key, const std::string& value) {
  if (dotted_key.empty()) throw ConfigError(dotted_key, "empty override key");
  Json* node = &document;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(dotted_key, "malformed override key");
    if (!node->is_object()) throw ConfigError(dotted_key, "override path crosses a non-object value");
    if (dot == std::string::npos) {
      Json parsed = Json::parse(value, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? Json(value) : parsed;
      return;
    }
    Json& child = (*node)[part];
    if (child.is_null()) child = Json::object();
    node = &child;
    start = dot + 1;
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path);
  Json document = Json::parse(in, nullptr, false);
  if (document.is_discarded()) throw ConfigError("config", "malformed JSON in " + path);
  return document;
}

std::string config_hash(const Json& document) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : document.dump()) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

}  // namespace torsionlab::cli
