#pragma once
// End-to-end verification recipes.
//
// Each check runs one acceptance pipeline (closed forms, bridge statistics,
// envelope and barrier scaling, simulation bands) against its declared
// tolerances and reports PASS/FAIL with the measured numbers. Simulation
// fixtures (trial counts, pruning windows and caps, seeds, O(1) bands) are
// declared here, not in the sampling library.

#include <string>
#include <vector>

namespace tibrw::accept {

struct CheckResult {
  std::string name;
  bool pass = true;
  std::vector<std::string> lines;
};

inline constexpr int kNumCriteria = 11;

// Runs criteria `which` (1-based; empty = all), sharing simulation batches.
std::vector<CheckResult> run_criteria(const std::vector<int>& which, int threads = 0);

// Named recipes: thm1, thm2, greedy-gap, lemma2, lemma3, independent-beta.
// Throws std::invalid_argument for unknown names.
CheckResult run_recipe(const std::string& name, int threads = 0);

std::vector<std::string> recipe_names();

}  // namespace tibrw::accept
