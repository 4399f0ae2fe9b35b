#pragma once
// Inhomogeneous random walks, the bridge decomposition, and the Monte Carlo
// estimators behind the two path lemmas.
//
// The decomposition writes S_n(k) = s_{k,n}(S_n) + Stilde_{k,n} with the
// interpolant s_{k,n}(x) = x V(k)/V(n) built from the cumulative variance
// V(k) = sum_{j<k} sigma^2(j). Stilde is Gaussian, mean zero, independent of
// S_n, with Var = V(k)(V(n)-V(k))/V(n); for two equal phases these reduce to
// the familiar split forms.

#include <cstdint>
#include <vector>

#include "tibrw/env.hpp"
#include "tibrw/rng.hpp"

namespace tibrw {

struct WalkPath {
  std::vector<double> values;  // size n+1, values[0] = 0
};

class BridgeSpec {
 public:
  BridgeSpec(VarianceProfile profile, long n, double c_f);

  long n() const { return n_; }
  double c_f() const { return c_f_; }
  const VarianceProfile& profile() const { return profile_; }

  double cum_variance(long k) const;             // V(k)
  double interpolant(long k, double x) const;    // s_{k,n}(x)
  double envelope(long k) const;                 // c_f * min(k, n-k)^{2/3}
  double bridge_variance(long k) const;          // Var Stilde_{k,n}

 private:
  VarianceProfile profile_;
  long n_;
  double c_f_;
  std::vector<double> cumvar_;
};

struct BarrierSpec {
  long n;
  double y;
  double coefficient = 100.0;

  BarrierSpec(long n_, double y_, double coefficient_ = 100.0);

  // L(k): 0 at both ends, coefficient*log k up to n/2, coefficient*log(n-k) after.
  double barrier(long k) const;
};

WalkPath sample_walk(const VarianceProfile& profile, long n, rng::Stream& stream);

// Path pinned at S_n = endpoint: interpolant of the endpoint plus the
// fluctuation of an independent walk around its own interpolant.
WalkPath sample_bridge(const BridgeSpec& spec, double endpoint, rng::Stream& stream);

struct McEstimate {
  double estimate;
  double std_error;
  long trials;
};

// P(|Stilde_{k,n}| <= f_{k,n} for all k), binomial standard error.
McEstimate envelope_probability(const BridgeSpec& spec, long trials, std::uint64_t seed,
                                int threads = 0);
McEstimate envelope_probability_serial(const BridgeSpec& spec, long trials,
                                       std::uint64_t seed);

// P(B_k - (k/n) B_n <= L(k) + y for all k), standard-increment walk.
McEstimate bb_barrier_probability(const BarrierSpec& spec, long trials, std::uint64_t seed,
                                  int threads = 0);
McEstimate bb_barrier_probability_serial(const BarrierSpec& spec, long trials,
                                         std::uint64_t seed);

// min(1, 2^n Q(x / sqrt(V(n)))) computed in log space; the first-moment upper
// bound on P(M_n > x).
double first_moment_tail_bound(const VarianceProfile& profile, long n, double x);

}  // namespace tibrw
