#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace refugia {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string details;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  bool all_pass() const;
};

/// Runs the full verification suite on the desk-scale fixtures
/// (ring n=256 and rect 128x64), printing one pass/fail line per criterion.
AcceptanceReport run_acceptance(std::ostream& log);

}  // namespace refugia
