#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace daclab::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

inline constexpr std::uint64_t kDefaultSeed = 7;

/// Runs the full acceptance suite, printing one pass/fail line per
/// criterion to `log`.
std::vector<CriterionResult> run_all(std::uint64_t seed, std::ostream& log);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace daclab::acceptance
