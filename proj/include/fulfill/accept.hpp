#pragma once
// Acceptance suites: the repository's twelve go/no-go checks, runnable as a
// whole ("all") or one suite at a time.  Each criterion re-derives its
// expected numbers from the oracles (brute force, analytic annotations,
// bound formulas) rather than trusting the policies under test.

#include <iosfwd>
#include <string>
#include <vector>

namespace fulfill {

struct CriterionResult {
  int number = 0;       // 1..12
  std::string id;       // suite id, e.g. "lemma-1"
  bool pass = false;
  std::string detail;   // one-line outcome summary with measured values
  double seconds = 0;
};

struct AcceptanceReport {
  std::string suite;
  std::vector<CriterionResult> results;
  bool pass = true;
};

// Valid suite ids: "all" plus one id per criterion.
std::vector<std::string> acceptance_suite_ids();

// Runs one suite (or all of them).  `progress`, when non-null, receives one
// "[PASS|FAIL] n id: detail" line per criterion as it finishes.  Throws
// ConfigError on unknown suite ids.
AcceptanceReport run_acceptance(const std::string& suite_id,
                                std::ostream* progress = nullptr);

std::string acceptance_report_json(const AcceptanceReport& report);

}  // namespace fulfill
