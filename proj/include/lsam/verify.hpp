#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lsam {

struct CriterionResult {
  std::string id;      // C1 .. C11
  std::string name;
  bool pass = false;
  std::string detail;  // measured values vs thresholds
};

// Verification suites. Each returns one result per criterion it covers, with
// every tolerance pinned in code.
std::vector<CriterionResult> verify_gradients();    // C1
std::vector<CriterionResult> verify_densities();    // C1, C2
std::vector<CriterionResult> verify_score();        // C3
std::vector<CriterionResult> verify_rates();        // C4, C5, C6, C8
std::vector<CriterionResult> verify_anchor();       // C7
std::vector<CriterionResult> verify_distributed();  // C9, C10
std::vector<CriterionResult> verify_basins();       // C11

// Runs a named suite: densities, score, rates, anchor, distributed, basins,
// or all. Throws ConfigError for an unknown name.
std::vector<CriterionResult> run_suite(const std::string& name);

void print_report(std::ostream& os, const std::vector<CriterionResult>& rs);
bool all_pass(const std::vector<CriterionResult>& rs);

}  // namespace lsam
