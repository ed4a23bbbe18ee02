#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace varsample {

struct VerifyOptions {
  // Empty runs every suite.
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  // Test hook: added to every nonzero kernel value inside the partition-of-unity suite.
  double kernel_perturbation = 0.0;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// kernels, partition-of-unity, operators, derivative-identity, variation-diminishing, pgm
const std::vector<std::string>& verify_suite_names();

// Throws ConfigError for an unknown suite name.
std::vector<SuiteResult> run_verify(const VerifyOptions& options);

// One line per suite; returns true when every suite passed.
bool print_verdicts(const std::vector<SuiteResult>& results, std::ostream& out);

}  // namespace varsample
