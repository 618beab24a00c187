// Runs every acceptance criterion with the pinned tolerances.
#include <iostream>

#include "indef/acceptance.hpp"

int main() {
  const auto results = indef::run_acceptance(indef::AcceptanceConfig{}, &std::cerr);
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.title << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
  return all ? 0 : 1;
}
