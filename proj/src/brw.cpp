#include "tibrw/brw.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tibrw/gauss.hpp"
#include "tibrw/rng.hpp"

namespace tibrw {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Particle {
  double value;
  std::uint64_t key;
};

struct Workspace {
  std::vector<Particle> cur;
  std::vector<Particle> next;
  std::vector<double> scratch;
  std::vector<long> buckets;
};

// Exact value of the cap-th largest of next[0..count) via one histogram pass
// between the level bounds, with a quickselect fallback if a single bucket
// gets too crowded. Exactness matters: the compact pass keeps v > cutoff
// plus first-come ties, which reproduces top-cap selection deterministically.
double select_cutoff(const Particle* next, long count, long cap, double lo, double hi,
                     Workspace& ws, long* strictly_greater) {
  if (!(hi > lo)) {  // degenerate level, all values equal
    *strictly_greater = 0;
    return hi;
  }
  constexpr long kNumBuckets = 4096;
  ws.buckets.assign(kNumBuckets, 0);
  const double scale = static_cast<double>(kNumBuckets) / (hi - lo);
  const auto bucket_of = [&](double v) {
    const long b = static_cast<long>((v - lo) * scale);
    return std::min(b, kNumBuckets - 1);
  };
  for (long i = 0; i < count; ++i) ++ws.buckets[bucket_of(next[i].value)];

  long above = 0;  // count in buckets strictly higher than the boundary bucket
  long boundary = kNumBuckets - 1;
  for (;; --boundary) {
    if (above + ws.buckets[boundary] >= cap || boundary == 0) break;
    above += ws.buckets[boundary];
  }

  const long in_bucket = ws.buckets[boundary];
  if (in_bucket > 1 << 17) {  // pathological clustering: plain quickselect
    ws.scratch.resize(count);
    for (long i = 0; i < count; ++i) ws.scratch[i] = next[i].value;
    std::nth_element(ws.scratch.begin(), ws.scratch.begin() + (cap - 1),
                     ws.scratch.end(), std::greater<double>());
    const double cutoff = ws.scratch[cap - 1];
    long greater = 0;
    for (long i = 0; i < count; ++i) greater += next[i].value > cutoff ? 1 : 0;
    *strictly_greater = greater;
    return cutoff;
  }

  ws.scratch.clear();
  for (long i = 0; i < count; ++i) {
    if (bucket_of(next[i].value) == boundary) ws.scratch.push_back(next[i].value);
  }
  const long need = cap - above;  // rank of the cutoff inside the boundary bucket
  std::nth_element(ws.scratch.begin(), ws.scratch.begin() + (need - 1),
                   ws.scratch.end(), std::greater<double>());
  const double cutoff = ws.scratch[need - 1];
  long greater_in_bucket = 0;
  for (double v : ws.scratch) greater_in_bucket += v > cutoff ? 1 : 0;
  *strictly_greater = above + greater_in_bucket;
  return cutoff;
}

// One branching step for every particle in cur[0..count), constant sigma.
// Children are generated in tree order (first child, second child); returns
// the new population count after the window filter and the cap.
long branch_level(const Particle* cur, long count, Particle* next, double sigma,
                  double window, long cap, bool* capped, bool swap_labels,
                  Workspace& ws) {
  const int first = swap_labels ? 1 : 0;
  const int second = swap_labels ? 0 : 1;
  double level_max = -kInf;
  double level_min = kInf;
  for (long i = 0; i < count; ++i) {
    const double base = cur[i].value;
    const std::uint64_t h0 = rng::child_key(cur[i].key, first);
    const std::uint64_t h1 = rng::child_key(cur[i].key, second);
    const double v0 = base + sigma * gauss::quantile_fast(rng::to_unit(h0));
    const double v1 = base + sigma * gauss::quantile_fast(rng::to_unit(h1));
    next[2 * i] = {v0, h0};
    next[2 * i + 1] = {v1, h1};
    level_max = std::max(level_max, std::max(v0, v1));
    level_min = std::min(level_min, std::min(v0, v1));
  }
  long n_next = 2 * count;
  if (window != kInf && level_max - window > level_min) {
    const double threshold = level_max - window;
    long kept = 0;
    for (long i = 0; i < n_next; ++i) {
      if (next[i].value >= threshold) next[kept++] = next[i];
    }
    n_next = kept;
  }
  if (n_next > cap) {
    long greater = 0;
    const double cutoff =
        select_cutoff(next, n_next, cap, level_min, level_max, ws, &greater);
    // Branchless compact in traversal order: keep v > cutoff, admit cutoff
    // ties first come first served until exactly cap survive.
    long kept = 0;
    long ties_allowed = cap - greater;
    for (long i = 0; i < n_next; ++i) {
      const double v = next[i].value;
      const long tie = (v == cutoff && ties_allowed > 0) ? 1 : 0;
      ties_allowed -= tie;
      next[kept] = next[i];
      kept += (v > cutoff ? 1 : 0) | tie;
    }
    n_next = kept;
    *capped = true;
  }
  return n_next;
}

// Population size ceiling over all levels (children before any pruning),
// for one-shot buffer allocation.
long max_population(long n, long cap) {
  long pop = 1, needed = 1;
  for (long k = 0; k < n; ++k) {
    pop = 2 * std::min(pop, cap);
    needed = std::max(needed, pop);
    if (pop >= 2 * cap) break;  // capped steady state
  }
  return needed;
}

struct TrialResult {
  double max;
  bool capped;
};

TrialResult run_tree_trial(const VarianceProfile& profile, long n, std::uint64_t root_key,
                           double window, long cap, Workspace& ws, bool swap_labels) {
  if (n == 0) return {0.0, false};
  ws.cur.resize(max_population(n, cap));
  ws.next.resize(max_population(n, cap));
  ws.cur[0] = {0.0, root_key};
  long count = 1;
  bool capped = false;
  const std::vector<long> bounds = profile.boundaries(n);
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const double sigma = std::sqrt(profile.segments()[j].variance);
    for (long k = bounds[j]; k < bounds[j + 1]; ++k) {
      count = branch_level(ws.cur.data(), count, ws.next.data(), sigma, window, cap,
                           &capped, swap_labels, ws);
      std::swap(ws.cur, ws.next);
    }
  }
  double best = -kInf;
  for (long i = 0; i < count; ++i) best = std::max(best, ws.cur[i].value);
  return {best, capped};
}

TrialResult run_greedy_trial(const VarianceProfile& profile, long n, std::uint64_t root_key,
                             double window, long cap, Workspace& ws, bool swap_labels) {
  if (n == 0) return {0.0, false};
  ws.cur.resize(max_population(n, cap));
  ws.next.resize(max_population(n, cap));
  Particle root{0.0, root_key};
  bool capped = false;
  const std::vector<long> bounds = profile.boundaries(n);
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    const double sigma = std::sqrt(profile.segments()[j].variance);
    ws.cur[0] = root;
    long count = 1;
    for (long k = bounds[j]; k < bounds[j + 1]; ++k) {
      count = branch_level(ws.cur.data(), count, ws.next.data(), sigma, window, cap,
                           &capped, swap_labels, ws);
      std::swap(ws.cur, ws.next);
    }
    // Collapse to the argmax particle; first index wins ties.
    long best = 0;
    for (long i = 1; i < count; ++i) {
      if (ws.cur[i].value > ws.cur[best].value) best = i;
    }
    root = ws.cur[best];
  }
  return {root.value, capped};
}

double run_independent_trial(double total_variance, long n, std::uint64_t key) {
  if (n == 0 || total_variance == 0.0) return 0.0;
  rng::Stream stream(key);
  const double log_u = std::log(stream.next_unit());
  return std::sqrt(total_variance) *
         gauss::quantile_of_root_power(log_u, static_cast<int>(n));
}

MaxSample run_all(const TrialConfig& config, int threads, bool swap_labels) {
  config.validate();
  MaxSample out;
  out.values.resize(config.trials);
  out.capped.assign(config.trials, 0);
  out.n = config.n;
  out.mode = config.mode;
  out.seed = config.seed;

  const double window = config.resolved_window();
  const long cap = config.resolved_cap();
  const double total_variance =
      config.n > 0 ? config.profile.total_variance(config.n) : 0.0;

#pragma omp parallel num_threads(threads > 0 ? threads : omp_get_max_threads())
  {
    Workspace ws;
#pragma omp for schedule(dynamic)
    for (long i = 0; i < config.trials; ++i) {
      const std::uint64_t key = rng::trial_key(config.seed, i);
      switch (config.mode) {
        case SimMode::Exact: {
          const TrialResult r = run_tree_trial(config.profile, config.n, key, kInf,
                                               std::numeric_limits<long>::max() / 4, ws,
                                               swap_labels);
          out.values[i] = r.max;
          break;
        }
        case SimMode::Pruned: {
          const TrialResult r =
              run_tree_trial(config.profile, config.n, key, window, cap, ws, swap_labels);
          out.values[i] = r.max;
          out.capped[i] = r.capped ? 1 : 0;
          break;
        }
        case SimMode::Greedy: {
          const TrialResult r =
              run_greedy_trial(config.profile, config.n, key, window, cap, ws, swap_labels);
          out.values[i] = r.max;
          out.capped[i] = r.capped ? 1 : 0;
          break;
        }
        case SimMode::IndependentExact:
          out.values[i] = run_independent_trial(total_variance, config.n, key);
          break;
      }
    }
  }
  return out;
}

}  // namespace

double default_window(long n) {
  return 18.0 * std::pow(static_cast<double>(n) / 2.0, 2.0 / 3.0);
}

void TrialConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("TrialConfig: need trials >= 1");
  if (n < 0) throw std::invalid_argument("TrialConfig: need n >= 0");
  if (n > 0) profile.require_compatible(n);
  switch (mode) {
    case SimMode::Exact:
      if (n > kExactMaxN) {
        throw std::invalid_argument("TrialConfig: exact mode caps n at " +
                                    std::to_string(kExactMaxN) + " (population 2^n)");
      }
      break;
    case SimMode::Greedy:
      if (profile.phases() < 2) {
        throw std::invalid_argument("TrialConfig: greedy mode needs >= 2 segments");
      }
      [[fallthrough]];
    case SimMode::Pruned:
      if (!(resolved_window() > 0.0)) {
        throw std::invalid_argument("TrialConfig: pruning window must be positive");
      }
      if (resolved_cap() < 1000) {
        throw std::invalid_argument("TrialConfig: population cap must be >= 1000");
      }
      break;
    case SimMode::IndependentExact:
      if (n > kIndependentMaxN) {
        throw std::invalid_argument("TrialConfig: independent mode caps n at " +
                                    std::to_string(kIndependentMaxN));
      }
      break;
  }
}

double TrialConfig::resolved_window() const {
  if (window) return *window;
  return n > 0 ? default_window(n) : 1.0;
}

long TrialConfig::resolved_cap() const { return cap ? *cap : kDefaultCap; }

long MaxSample::capped_count() const {
  long c = 0;
  for (std::uint8_t f : capped) c += f;
  return c;
}

MaxSample simulate(const TrialConfig& config, int threads) {
  return run_all(config, threads, false);
}

MaxSample simulate_serial(const TrialConfig& config) {
  config.validate();
  MaxSample out;
  out.values.resize(config.trials);
  out.capped.assign(config.trials, 0);
  out.n = config.n;
  out.mode = config.mode;
  out.seed = config.seed;
  const double window = config.resolved_window();
  const long cap = config.resolved_cap();
  const double total_variance =
      config.n > 0 ? config.profile.total_variance(config.n) : 0.0;
  Workspace ws;
  for (long i = 0; i < config.trials; ++i) {
    const std::uint64_t key = rng::trial_key(config.seed, i);
    switch (config.mode) {
      case SimMode::Exact:
        out.values[i] = run_tree_trial(config.profile, config.n, key, kInf,
                                       std::numeric_limits<long>::max() / 4, ws, false)
                            .max;
        break;
      case SimMode::Pruned: {
        const TrialResult r =
            run_tree_trial(config.profile, config.n, key, window, cap, ws, false);
        out.values[i] = r.max;
        out.capped[i] = r.capped ? 1 : 0;
        break;
      }
      case SimMode::Greedy: {
        const TrialResult r =
            run_greedy_trial(config.profile, config.n, key, window, cap, ws, false);
        out.values[i] = r.max;
        out.capped[i] = r.capped ? 1 : 0;
        break;
      }
      case SimMode::IndependentExact:
        out.values[i] = run_independent_trial(total_variance, config.n, key);
        break;
    }
  }
  return out;
}

namespace {

MaxSample checked(const TrialConfig& config, SimMode wanted, const char* what, int threads) {
  if (config.mode != wanted) {
    throw std::invalid_argument(std::string(what) + ": config.mode mismatch");
  }
  return simulate(config, threads);
}

}  // namespace

MaxSample simulate_max(const TrialConfig& config, int threads) {
  return checked(config, SimMode::Exact, "simulate_max", threads);
}

MaxSample simulate_max_pruned(const TrialConfig& config, int threads) {
  return checked(config, SimMode::Pruned, "simulate_max_pruned", threads);
}

MaxSample simulate_greedy(const TrialConfig& config, int threads) {
  return checked(config, SimMode::Greedy, "simulate_greedy", threads);
}

MaxSample sample_independent_max(const TrialConfig& config, int threads) {
  return checked(config, SimMode::IndependentExact, "sample_independent_max", threads);
}

double median_of_exact_independent_cdf(const VarianceProfile& profile, long n) {
  if (n < 1) throw std::invalid_argument("median_of_exact_independent_cdf: need n >= 1");
  profile.require_compatible(n);
  const double scale = std::sqrt(profile.total_variance(n));
  // Phi(z)^{2^n} = 1/2  <=>  log(-log Phi(z)) = log(log 2) - n log 2.
  const double target = std::log(kLn2) - static_cast<double>(n) * kLn2;
  double lo = 0.0;  // F(0) = log(log 2) > target for n >= 1
  double hi = std::sqrt(2.0 * static_cast<double>(n) * kLn2) + 3.0;
  while (gauss::log_neg_log_cdf(hi) > target) hi *= 1.5;
  while ((hi - lo) * scale > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (gauss::log_neg_log_cdf(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) * scale;
}

namespace detail {

MaxSample simulate_relabeled(const TrialConfig& config, int threads) {
  return run_all(config, threads, true);
}

}  // namespace detail

}  // namespace tibrw
