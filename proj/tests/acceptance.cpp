// Acceptance gate: every verification check must pass. Prints one pass/fail
// line per check; nonzero exit on any failure.
#include <iostream>

#include "polopt/verify.hpp"

int main() {
  polopt::verify::Options options;
  const auto results = polopt::verify::run_all(options);
  std::cout << polopt::verify::format_table(results);
  return polopt::verify::all_passed(results) ? 0 : 1;
}
