#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "torsionlab/error.hpp"

namespace tl = torsionlab;
namespace cli = torsionlab::cli;
namespace fs = std::filesystem;

namespace {

// "--scheme.n_max=50" -> ("scheme.n_max", "50"); bare "--flag" -> ("flag", "true").
std::vector<std::pair<std::string, std::string>> parse_overrides(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t k = 0; k < extras.size(); ++k) {
    const std::string& arg = extras[k];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) throw tl::ConfigError(arg, "unexpected argument");
    const std::string body = arg.substr(2);
    const auto eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (k + 1 < extras.size() && extras[k + 1].rfind("--", 0) != 0) {
      out.emplace_back(body, extras[++k]);
    } else {
      out.emplace_back(body, "true");
    }
  }
  return out;
}

std::string help_text() {
  std::string text = "Commands:\n";
  for (const cli::CommandInfo& c : cli::commands()) {
    text += "  ";
    text += c.name;
    text.append(c.name[0] && std::string(c.name).size() < 12 ? 12 - std::string(c.name).size() : 1, ' ');
    text += c.help;
    text += "\n";
  }
  text += "\nAny other --key=value flag overrides the config key (dotted paths allowed).\n";
  text += "verify-all takes --config DIR; overrides there are --cNN.key=value.\n";
  return text;
}

int verify_all(const std::string& config_dir, const std::string& out_dir,
               const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::vector<std::vector<std::pair<std::string, std::string>>> per(cli::criterion_count + 1);
  for (const auto& [key, value] : overrides) {
    int n = 0;
    const auto dot = key.find('.');
    if (key.size() < 4 || key[0] != 'c' || dot == std::string::npos || std::sscanf(key.c_str() + 1, "%d", &n) != 1 ||
        n < 1 || n > cli::criterion_count) {
      throw tl::ConfigError(key, "verify-all overrides must look like --cNN.key=value");
    }
    per[n].emplace_back(key.substr(dot + 1), value);
  }
  std::vector<tl::io::Json> configs;
  for (int n = 1; n <= cli::criterion_count; ++n) configs.push_back(cli::criterion_config(n, config_dir, per[n]));

  const fs::path out(out_dir);
  fs::create_directories(out);
  std::vector<cli::CriterionReport> reports;
  tl::io::Json summary = tl::io::Json::object();
  bool all = true;
  for (int n = 1; n <= cli::criterion_count; ++n) {
    reports.push_back(cli::run_criterion(n, configs[n - 1], out / "scratch" / ("c" + std::to_string(n))));
    const cli::CriterionReport& r = reports.back();
    std::cout << cli::summary_line(r) << std::endl;
    all = all && r.pass();
    summary[std::to_string(n)] = {{"title", r.title}, {"status", r.pass() ? "pass" : "fail"}, {"error", r.error}};
  }
  tl::io::ArtifactWriter writer(out);
  writer.write_csv("report.csv", cli::report_table(reports));
  writer.write_json("summary.json", {{"command", "verify-all"}, {"criteria", summary}, {"passed", all}});
  return all ? cli::exit_ok : cli::exit_failure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torsionlab: Schroedinger operators with singular potentials on grids"};
  app.allow_extras();
  app.footer(help_text());
  std::string command, config_path, out_dir;
  bool wall_time = false;
  app.add_option("command", command, "command to run")->required();
  app.add_option("--config", config_path, "JSON config (verify-all: directory of cNN.json)");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--wall-time", wall_time, "record wall-clock seconds in the summary");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_config;
  }

  try {
    const auto overrides = parse_overrides(app.remaining());
    if (command == "verify-all") {
      return verify_all(config_path.empty() ? "configs/acceptance" : config_path,
                        out_dir.empty() ? "verify-all-out" : out_dir, overrides);
    }
    bool known = false;
    for (const cli::CommandInfo& c : cli::commands()) known = known || command == c.name;
    if (!known) throw tl::ConfigError("command", "unknown command '" + command + "'");

    tl::io::Json doc = tl::io::Json::object();
    if (!config_path.empty()) doc = cli::read_json_file(config_path);
    for (const auto& [key, value] : overrides) cli::apply_override(doc, key, value);
    cli::RunConfig config = cli::parse_config(doc);
    if (!out_dir.empty()) config.out = out_dir;
    if (config.out.empty()) throw tl::ConfigError("out", "no output directory (use --out DIR)");
    return cli::run_command(command, config, config.out, {wall_time});
  } catch (const tl::ConfigError& e) {
    std::cerr << "torsionlab: config error: " << e.what() << "\n";
    return cli::exit_config;
  } catch (const tl::SolverError& e) {
    std::cerr << "torsionlab: solver failure: " << e.what() << "\n";
    return cli::exit_failure;
  } catch (const tl::Error& e) {
    std::cerr << "torsionlab: " << e.what() << "\n";
    return cli::exit_config;
  } catch (const std::exception& e) {
    std::cerr << "torsionlab: " << e.what() << "\n";
    return cli::exit_failure;
  }
}
