#pragma once

#include <string>
#include <vector>

namespace qdce {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int threads = 0;
  int fig4_steps = 71;  // per axis; 71 points on [0.2, 3] keep omega_d = 1 and 1 + Omega on the grid
};

constexpr int kCriterionCount = 10;

// Throws ConfigInvalid for ids outside 1..kCriterionCount.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

// "[PASS] C3 dce phenomenology: ..." on one line.
std::string format(const CriterionResult& r);

}  // namespace qdce
