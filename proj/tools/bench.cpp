// Serial vs OpenMP timing for the Monte Carlo kernels, with a bitwise
// equality check between the two paths.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <string>

#include "tibrw/brw.hpp"
#include "tibrw/env.hpp"
#include "tibrw/walks.hpp"

namespace {

double now() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

bool same_values(const tibrw::MaxSample& a, const tibrw::MaxSample& b) {
  if (a.values.size() != b.values.size()) return false;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] != b.values[i]) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  long trials = argc > 1 ? std::stol(argv[1]) : 200;
  const int max_threads = omp_get_max_threads();
  const tibrw::VarianceProfile profile = tibrw::VarianceProfile::two_phase(1.0, 4.0);

  std::printf("tibrw kernel benchmark (max threads %d)\n\n", max_threads);

  {
    tibrw::TrialConfig cfg{profile, 64, tibrw::SimMode::Pruned, 42, trials,
                           std::nullopt, 100000};
    const double t0 = now();
    const tibrw::MaxSample serial = tibrw::simulate_serial(cfg);
    const double t1 = now();
    const tibrw::MaxSample parallel = tibrw::simulate(cfg, max_threads);
    const double t2 = now();
    std::printf("pruned BRW n=64, cap 1e5, %ld trials\n", trials);
    std::printf("  serial   %8.3f s\n", t1 - t0);
    std::printf("  omp x%-3d %8.3f s  (speedup %.2fx, outputs %s)\n", max_threads,
                t2 - t1, (t1 - t0) / (t2 - t1),
                same_values(serial, parallel) ? "bitwise equal" : "DIFFER");
  }

  {
    const tibrw::BridgeSpec spec(profile, 256, 6.0);
    const long mc_trials = 40 * trials;
    const double t0 = now();
    const tibrw::McEstimate serial =
        tibrw::envelope_probability_serial(spec, mc_trials, 42);
    const double t1 = now();
    const tibrw::McEstimate parallel =
        tibrw::envelope_probability(spec, mc_trials, 42, max_threads);
    const double t2 = now();
    std::printf("\nenvelope probability n=256, c_f=6, %ld trials\n", mc_trials);
    std::printf("  serial   %8.3f s  (estimate %.4f)\n", t1 - t0, serial.estimate);
    std::printf("  omp x%-3d %8.3f s  (speedup %.2fx, estimates %s)\n", max_threads,
                t2 - t1, (t1 - t0) / (t2 - t1),
                serial.estimate == parallel.estimate ? "equal" : "DIFFER");
  }

  return 0;
}
