#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "acceptance.hpp"

namespace cli = torsionlab::cli;
namespace fs = std::filesystem;

// Usage: acceptance_test CONFIG_DIR WORK_DIR [criterion ...]
int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance_test CONFIG_DIR WORK_DIR [criterion ...]\n";
    return 2;
  }
  const fs::path config_dir = argv[1], work_dir = argv[2];
  std::vector<int> selected;
  for (int k = 3; k < argc; ++k) selected.push_back(std::atoi(argv[k]));
  if (selected.empty()) {
    for (int n = 1; n <= cli::criterion_count; ++n) selected.push_back(n);
  }
  int failures = 0;
  for (int n : selected) {
    const auto report = cli::run_criterion(n, cli::criterion_config(n, config_dir), work_dir / ("c" + std::to_string(n)));
    std::cout << cli::summary_line(report) << std::endl;
    failures += !report.pass();
  }
  return failures == 0 ? 0 : 1;
}
