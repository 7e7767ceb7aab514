#include <cstdio>
#include <cstdlib>
#include <string>

#include "qcforge/acceptance.hpp"

// One line per criterion; failing sub-checks are listed under their criterion.
int main(int argc, char** argv) {
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool verbose = argc > 2 && std::string(argv[2]) == "-v";
  auto results = qcforge::run_acceptance({}, only);
  int failed = 0;
  for (const auto& c : results) {
    std::printf("%s  (%.2fs)\n", qcforge::format_criterion(c).c_str(), c.seconds);
    for (const auto& k : c.checks)
      if (!k.pass || verbose) std::printf("        %s %s\n", k.pass ? "ok  " : "FAIL", k.text.c_str());
    failed += c.pass ? 0 : 1;
  }
  std::printf("%zu criteria, %d passed, %d failed\n", results.size(), static_cast<int>(results.size()) - failed, failed);
  return failed == 0 ? 0 : 1;
}
