#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "torsionlab/io.hpp"

namespace torsionlab::cli {

struct CheckRow {
  std::string id;
  bool pass = false;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string note;
};

struct CriterionReport {
  int number = 0;
  std::string title;
  std::vector<CheckRow> checks;
  /// Set when the criterion could not run (exception text).
  std::string error;

  bool pass() const;
};

constexpr int criterion_count = 12;

/// Per-criterion parameters: cNN.json in the directory merged over built-in
/// defaults, then the overrides (dotted keys relative to the criterion).
Json criterion_config(int number, const std::filesystem::path& config_dir,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Runs one criterion; scratch output (criterion 12) goes under work_dir.
CriterionReport run_criterion(int number, const Json& config, const std::filesystem::path& work_dir);

/// "criterion,status,value,expected,tolerance" with one row per check.
io::CsvTable report_table(const std::vector<CriterionReport>& reports);

/// One line per criterion: "PASS  1  Torsion oracle (...)".
std::string summary_line(const CriterionReport& report);

}  // namespace torsionlab::cli
