#include <filesystem>
#include <fstream>
#include <iterator>

#include <gtest/gtest.h>

#include "acceptance.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "torsionlab/error.hpp"

namespace tl = torsionlab;
namespace cli = torsionlab::cli;
namespace fs = std::filesystem;
using cli::Json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("torsionlab_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

Json small_config() {
  return Json::parse(R"({"domain": {"type": "disk", "radius": 1}, "h": 0.0625,
                         "potential": {"type": "inverse_power_axis", "alpha": 1.5}})");
}

}  // namespace

TEST(Config, DefaultsParse) {
  const auto c = cli::parse_config(Json::object());
  EXPECT_DOUBLE_EQ(c.h, 1.0 / 64);
  EXPECT_EQ(c.scheme.n_max, 200u);
  EXPECT_EQ(c.workers, 1);
}

TEST(Config, UnknownKeyIsNamed) {
  Json doc = small_config();
  doc["scheme"] = {{"n_maxx", 3}};
  try {
    cli::parse_config(doc);
    FAIL() << "expected ConfigError";
  } catch (const tl::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("scheme.n_maxx"), std::string::npos);
  }
  doc = small_config();
  doc["potential"]["kappa"] = 1;
  EXPECT_THROW(cli::parse_config(doc), tl::ConfigError);
  doc = small_config();
  doc["potential"]["type"] = "yukawa";
  EXPECT_THROW(cli::parse_config(doc), tl::ConfigError);
}

TEST(Config, OverridesAndHash) {
  Json doc = small_config();
  const std::string before = cli::config_hash(doc);
  cli::apply_override(doc, "scheme.n_max", "50");
  cli::apply_override(doc, "datum.density", "random");
  EXPECT_EQ(doc["scheme"]["n_max"], 50);
  EXPECT_EQ(doc["datum"]["density"], "random");
  EXPECT_NE(cli::config_hash(doc), before);
  EXPECT_EQ(cli::config_hash(doc).size(), 16u);
  EXPECT_EQ(cli::config_hash(doc), cli::config_hash(Json::parse(doc.dump())));
}

TEST(Commands, DecomposeWritesSummary) {
  const fs::path dir = fresh_dir("decompose");
  const auto config = cli::parse_config(small_config());
  EXPECT_EQ(cli::run_command("decompose", config, dir.string()), cli::exit_ok);
  const Json summary = Json::parse(slurp(dir / "summary.json"));
  for (const char* key : {"command", "config_hash", "grid", "timings", "result"}) EXPECT_TRUE(summary.contains(key));
  EXPECT_EQ(summary["result"]["component_count"], 2);
  EXPECT_TRUE(fs::exists(dir / "labels.pgm"));
  fs::remove_all(dir);
}

TEST(Commands, RerunsAreByteIdentical) {
  const fs::path a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
  Json doc = small_config();
  doc["datum"] = {{"density", "random"}};
  const auto config = cli::parse_config(doc);
  for (const char* command : {"torsion", "iterate", "eigen"}) {
    cli::run_command(command, config, (a / command).string());
    cli::run_command(command, config, (b / command).string());
    for (const auto& entry : fs::directory_iterator(a / command)) {
      EXPECT_EQ(slurp(entry.path()), slurp(b / command / entry.path().filename())) << entry.path();
    }
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Commands, WeightCertificationFailureExitCode) {
  const fs::path dir = fresh_dir("weight_fail");
  Json doc = Json::parse(R"({"domain": {"type": "rectangle"}, "h": 0.0625, "potential": {"type": "constant", "value": -20}})");
  EXPECT_EQ(cli::run_command("weight", cli::parse_config(doc), dir.string()), cli::exit_certification);
  EXPECT_TRUE(fs::exists(dir / "certificate.csv"));
  fs::remove_all(dir);
}

TEST(Acceptance, CriterionConfigRejectsUnknownKeys) {
  const fs::path dir = fresh_dir("acceptance_config");
  fs::create_directories(dir);
  std::ofstream(dir / "c02.json") << R"({"tolerance": 1})";
  EXPECT_THROW(cli::criterion_config(2, dir), tl::ConfigError);
  EXPECT_THROW(cli::criterion_config(1, dir, {{"radial_tol", "\"tight\""}}), tl::ConfigError);
  const Json c = cli::criterion_config(1, dir, {{"radial_tol", "1e-20"}});
  EXPECT_EQ(c["radial_tol"].get<double>(), 1e-20);
  fs::remove_all(dir);
}

TEST(Acceptance, TightenedToleranceFailsCleanly) {
  const Json c = cli::criterion_config(2, "/nonexistent", {{"h", "0.0625"}, {"rel_tol", "1e-9"}});
  const auto report = cli::run_criterion(2, c, fs::temp_directory_path());
  EXPECT_FALSE(report.pass());
  EXPECT_TRUE(report.error.empty());
  const auto table = cli::report_table({report});
  EXPECT_EQ(table.header.size(), 5u);
  EXPECT_EQ(table.rows.front()[1], "fail");
  EXPECT_EQ(cli::summary_line(report).rfind("FAIL", 0), 0u);
}
