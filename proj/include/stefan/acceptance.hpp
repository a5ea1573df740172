#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace stefan {

struct AcceptanceOptions {
  double scale = 1.0;            // multiplies every path count
  unsigned workers = 1;
  std::uint64_t seed = 20240611;
  std::string scratch_dir;       // artifacts of the determinism runs
  std::vector<int> only;         // empty runs all twelve
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;            // measured statistics against their tolerances
  double seconds = 0.0;
};

/// Runs the acceptance criteria in order, printing one line per criterion to
/// `log` as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& log);

/// "[PASS] 3 growth_self_consistency (12.1 s): ..."
std::string format_criterion(const CriterionResult& result);

}  // namespace stefan
