#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nmating {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Numbered verification suites; each returns one result per sub-check.
//  1 symbol model round trip            6 quotient consistency
//  2 co-landing pairs of the symmetric   7 semi-conjugacy at copy centers
//    cubic                              8 ray-pair equivalence sampling
//  3 biaccessibility via partner rays   9 correspondence skeleton
//  4 newton ray structure              10 boundary parameter graphs
//  5 nest shrinking
std::vector<CheckResult> run_criterion(int n);
std::vector<CheckResult> run_all_criteria();
int criterion_count();

} // namespace nmating
