#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace soco {

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  std::size_t r_grid = 201;
  std::filesystem::path out_dir = "accept";
  /// Rerun everything into out_dir/rerun and compare the summary bytes.
  bool check_reproducibility = true;
  /// Progress lines go here when set.
  std::ostream* log = nullptr;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  std::filesystem::path summary;

  bool all_passed() const;
};

inline constexpr int kCriteriaCount = 11;

/// Runs one of criteria 1..10, writing its table under out_dir/criteria.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts);

/// Runs every criterion and writes out_dir/summary.csv.
AcceptanceReport run_acceptance(const AcceptanceOptions& opts);

/// "[PASS] 3 name: detail"
std::string format_result(const CriterionResult& r);

}  // namespace soco
