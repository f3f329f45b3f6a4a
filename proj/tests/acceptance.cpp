// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. With no arguments runs every criterion; `--criterion k`
// runs one. Prints one line per criterion and exits 1 if any fails.
#include "vrvfl/validation.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion k]...\n";
      return 2;
    }
  }
  if (ids.empty()) {
    for (int k = 1; k <= vrvfl::validation::kCriterionCount; ++k) ids.push_back(k);
  }
  const auto scratch = std::filesystem::temp_directory_path() / "vrvfl_acceptance";
  std::filesystem::create_directories(scratch);

  bool ok = true;
  for (int id : ids) {
    const auto r = vrvfl::validation::run_criterion(id, scratch);
    std::cout << vrvfl::validation::format_result(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}
