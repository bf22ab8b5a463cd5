#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gci/core.hpp"
#include "gci/linalg.hpp"

namespace gci::cli {

struct Check {
  std::string name;
  bool passed;
  std::string detail;  // measured vs expected
};

// Diagnostic lines are printed but never fail a target.
struct Report {
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool passed() const;
};

enum class Target { Fig2, Fig3, HalfZero, Qutrit, IsothermConvergence };

const std::vector<std::string>& target_names();
Target parse_target(const std::string& name);  // throws ScenarioError

Report reproduce(Target target);
// One "PASS name: detail" or "FAIL name: detail" line per check, then "note: ..." lines.
void print_report(std::ostream& os, const Report& report);

// The qutrit example: rho0, H = diag(ln 3, ln 3/2, 0) and the interaction generator.
CMatrix qutrit_rho0();
LevelSystem qutrit_levels();
CMatrix qutrit_interaction();

// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gci::cli
