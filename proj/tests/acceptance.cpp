// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   acceptance                 all criteria
//   acceptance --only 3 5      selected criteria
//   acceptance --inject-fault  test mode with corrupted channels

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "bellnet/acceptance.hpp"

int main(int argc, char** argv) {
  bellnet::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--inject-fault") {
      opt.inject_channel_fault = true;
    } else if (arg == "--only") {
      while (i + 1 < argc && argv[i + 1][0] != '-') opt.only.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--only N...] [--inject-fault]\n";
      return 1;
    }
  }
  int failed = 0;
  try {
    bellnet::run_acceptance(opt, [&](const bellnet::CriterionResult& r) {
      std::cout << bellnet::format_result_line(r) << std::endl;
      if (!r.passed) ++failed;
    });
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return failed == 0 ? 0 : 2;
}
