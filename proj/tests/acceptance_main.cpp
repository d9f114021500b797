// Runs acceptance criteria 1-9 (or those named on the command line) and
// prints one PASS/FAIL line each. Exit status 0 iff every criterion passes.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "revlab/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  const auto results = revlab::run_acceptance(ids, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << "acceptance: " << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
