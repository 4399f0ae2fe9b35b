#include "tibrw/walks.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

#include "tibrw/gauss.hpp"

namespace tibrw {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require_k(long k, long n) {
  if (k < 0 || k > n) {
    throw std::out_of_range("bridge: k outside [0,n]");
  }
}

}  // namespace

BridgeSpec::BridgeSpec(VarianceProfile profile, long n, double c_f)
    : profile_(std::move(profile)), n_(n), c_f_(c_f) {
  if (n_ < 1) throw std::invalid_argument("BridgeSpec: need n >= 1");
  if (!(c_f_ > 0.0)) throw std::invalid_argument("BridgeSpec: need c_f > 0");
  profile_.require_compatible(n_);
  cumvar_.resize(n_ + 1);
  cumvar_[0] = 0.0;
  const std::vector<long> bounds = profile_.boundaries(n_);
  long k = 0;
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const double var = profile_.segments()[j].variance;
    for (; k < bounds[j + 1]; ++k) cumvar_[k + 1] = cumvar_[k] + var;
  }
}

double BridgeSpec::cum_variance(long k) const {
  require_k(k, n_);
  return cumvar_[k];
}

double BridgeSpec::interpolant(long k, double x) const {
  require_k(k, n_);
  return x * cumvar_[k] / cumvar_[n_];
}

double BridgeSpec::envelope(long k) const {
  require_k(k, n_);
  return c_f_ * std::pow(static_cast<double>(std::min(k, n_ - k)), 2.0 / 3.0);
}

double BridgeSpec::bridge_variance(long k) const {
  require_k(k, n_);
  return cumvar_[k] * (cumvar_[n_] - cumvar_[k]) / cumvar_[n_];
}

BarrierSpec::BarrierSpec(long n_, double y_, double coefficient_)
    : n(n_), y(y_), coefficient(coefficient_) {
  if (n < 4 || n % 2 != 0) throw std::invalid_argument("BarrierSpec: need even n >= 4");
  if (!(y >= 0.0)) throw std::invalid_argument("BarrierSpec: need y >= 0");
}

double BarrierSpec::barrier(long k) const {
  require_k(k, n);
  if (k == 0 || k == n) return 0.0;
  if (k <= n / 2) return coefficient * std::log(static_cast<double>(k));
  return coefficient * std::log(static_cast<double>(n - k));
}

WalkPath sample_walk(const VarianceProfile& profile, long n, rng::Stream& stream) {
  profile.require_compatible(n);
  WalkPath path;
  path.values.resize(n + 1);
  path.values[0] = 0.0;
  if (n == 0) return path;
  const std::vector<long> bounds = profile.boundaries(n);
  long k = 0;
  double v = 0.0;
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const double sigma = std::sqrt(profile.segments()[j].variance);
    for (; k < bounds[j + 1]; ++k) {
      v += sigma * gauss::quantile_fast(stream.next_unit());
      path.values[k + 1] = v;
    }
  }
  return path;
}

WalkPath sample_bridge(const BridgeSpec& spec, double endpoint, rng::Stream& stream) {
  WalkPath walk = sample_walk(spec.profile(), spec.n(), stream);
  const double total = walk.values[spec.n()];
  for (long k = 0; k < spec.n(); ++k) {
    walk.values[k] += spec.interpolant(k, endpoint - total);
  }
  walk.values[spec.n()] = endpoint;  // pinned, not total + (endpoint - total)
  return walk;
}

namespace {

bool envelope_trial(const BridgeSpec& spec, std::uint64_t key) {
  rng::Stream stream(key);
  const long n = spec.n();
  WalkPath walk = sample_walk(spec.profile(), n, stream);
  const double total = walk.values[n];
  for (long k = 1; k < n; ++k) {
    const double fluct = walk.values[k] - spec.interpolant(k, total);
    if (std::abs(fluct) > spec.envelope(k)) return false;
  }
  return true;
}

bool barrier_trial(const BarrierSpec& spec, std::uint64_t key) {
  rng::Stream stream(key);
  const long n = spec.n;
  std::vector<double> walk(n + 1);
  walk[0] = 0.0;
  for (long k = 0; k < n; ++k) {
    walk[k + 1] = walk[k] + gauss::quantile_fast(stream.next_unit());
  }
  const double total = walk[n];
  for (long k = 1; k < n; ++k) {
    const double bridge = walk[k] - total * static_cast<double>(k) / static_cast<double>(n);
    if (bridge > spec.barrier(k) + spec.y) return false;
  }
  return true;
}

McEstimate binomial_estimate(long successes, long trials) {
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

}  // namespace

McEstimate envelope_probability(const BridgeSpec& spec, long trials, std::uint64_t seed,
                                int threads) {
  if (trials < 100) throw std::invalid_argument("envelope_probability: need trials >= 100");
  long successes = 0;
#pragma omp parallel for schedule(static) reduction(+ : successes) \
    num_threads(threads > 0 ? threads : omp_get_max_threads())
  for (long i = 0; i < trials; ++i) {
    successes += envelope_trial(spec, rng::trial_key(seed, i)) ? 1 : 0;
  }
  return binomial_estimate(successes, trials);
}

McEstimate envelope_probability_serial(const BridgeSpec& spec, long trials,
                                       std::uint64_t seed) {
  if (trials < 100) throw std::invalid_argument("envelope_probability: need trials >= 100");
  long successes = 0;
  for (long i = 0; i < trials; ++i) {
    successes += envelope_trial(spec, rng::trial_key(seed, i)) ? 1 : 0;
  }
  return binomial_estimate(successes, trials);
}

McEstimate bb_barrier_probability(const BarrierSpec& spec, long trials, std::uint64_t seed,
                                  int threads) {
  if (trials < 1000) throw std::invalid_argument("bb_barrier_probability: need trials >= 1000");
  long successes = 0;
#pragma omp parallel for schedule(static) reduction(+ : successes) \
    num_threads(threads > 0 ? threads : omp_get_max_threads())
  for (long i = 0; i < trials; ++i) {
    successes += barrier_trial(spec, rng::trial_key(seed, i)) ? 1 : 0;
  }
  return binomial_estimate(successes, trials);
}

McEstimate bb_barrier_probability_serial(const BarrierSpec& spec, long trials,
                                         std::uint64_t seed) {
  if (trials < 1000) throw std::invalid_argument("bb_barrier_probability: need trials >= 1000");
  long successes = 0;
  for (long i = 0; i < trials; ++i) {
    successes += barrier_trial(spec, rng::trial_key(seed, i)) ? 1 : 0;
  }
  return binomial_estimate(successes, trials);
}

double first_moment_tail_bound(const VarianceProfile& profile, long n, double x) {
  if (n < 1) throw std::invalid_argument("first_moment_tail_bound: need n >= 1");
  profile.require_compatible(n);
  const double z = x / std::sqrt(profile.total_variance(n));
  const double log_bound = static_cast<double>(n) * kLn2 + gauss::log_sf(z);
  return log_bound >= 0.0 ? 1.0 : std::exp(log_bound);
}

}  // namespace tibrw
