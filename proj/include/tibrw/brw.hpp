#pragma once
// Branching random walk maxima: exact level-by-level simulation, the
// windowed/capped pruned variant, the greedy sub-maximum, and the exact
// sampler for the independent-walks comparison model.
//
// Trials are independent; trial i draws from a key derived from
// (seed, i), so results are bit-identical for any thread count and the
// pruned kernel with no-op pruning reproduces the exact kernel bitwise.

#include <cstdint>
#include <optional>
#include <vector>

#include "tibrw/env.hpp"

namespace tibrw {

enum class SimMode { Exact, Pruned, Greedy, IndependentExact };

// Window derived from the fluctuation-envelope scale: 6 * c_f * (n/2)^{2/3}
// with c_f = 3. Particles further than this below the running maximum are
// discarded in pruned mode.
double default_window(long n);

inline constexpr long kDefaultCap = 1'000'000;
inline constexpr long kExactMaxN = 26;
inline constexpr long kIndependentMaxN = 10'000;

struct TrialConfig {
  VarianceProfile profile;
  long n = 0;
  SimMode mode = SimMode::Exact;
  std::uint64_t seed = 0;
  long trials = 1;
  std::optional<double> window;  // Pruned/Greedy; default_window(n) if unset
  std::optional<long> cap;       // Pruned/Greedy; kDefaultCap if unset

  void validate() const;
  double resolved_window() const;
  long resolved_cap() const;
};

struct MaxSample {
  std::vector<double> values;        // one simulated maximum per trial
  std::vector<std::uint8_t> capped;  // trial hit the population cap (Pruned/Greedy)
  long n = 0;
  SimMode mode = SimMode::Exact;
  std::uint64_t seed = 0;

  long capped_count() const;
};

// Dispatch on config.mode; OpenMP over trials (threads = 0 uses the OMP default).
MaxSample simulate(const TrialConfig& config, int threads = 0);

// Plain-loop reference; must agree bitwise with simulate() for any thread count.
MaxSample simulate_serial(const TrialConfig& config);

// Mode-checked entry points.
MaxSample simulate_max(const TrialConfig& config, int threads = 0);
MaxSample simulate_max_pruned(const TrialConfig& config, int threads = 0);
MaxSample simulate_greedy(const TrialConfig& config, int threads = 0);
MaxSample sample_independent_max(const TrialConfig& config, int threads = 0);

// Median of the exact independent-model CDF Phi(x/sqrt(V(n)))^{2^n} by
// bracketed bisection in log-tail space, 1e-9 absolute. Needs no sampling;
// serves as the independent oracle for the sampler above.
double median_of_exact_independent_cdf(const VarianceProfile& profile, long n);

namespace detail {
// Child labels swapped throughout the tree; same law as simulate() by
// exchangeability. Test hook.
MaxSample simulate_relabeled(const TrialConfig& config, int threads = 0);
}  // namespace detail

}  // namespace tibrw
