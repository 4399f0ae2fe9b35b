#pragma once
// Counter-based random number plumbing.
//
// All randomness in this project derives from 64-bit keys pushed through the
// SplitMix64 finalizer. Trial i of a run gets its own stream key from
// (master seed, i), so trials can execute on any number of threads and still
// produce bit-identical output ordered by trial index. Tree-structured
// samplers (the BRW kernels) derive one key per particle from the parent's
// key, which keeps a pruned population and a full population on the same
// underlying draws.

#include <cstdint>

namespace tibrw::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 53-bit mantissa, strictly inside (0,1) so Phi^{-1} never sees 0 or 1.
inline double to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

inline std::uint64_t trial_key(std::uint64_t master_seed, std::uint64_t trial) {
  return mix64(master_seed + kGolden * (trial + 1));
}

// Sibling constants differ, so two children of one particle never collide.
inline constexpr std::uint64_t kChild0 = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t kChild1 = 0xc2b2ae3d27d4eb4fULL;

inline std::uint64_t child_key(std::uint64_t parent, int which) {
  return mix64(parent + (which == 0 ? kChild0 : kChild1));
}

// Sequential SplitMix64 stream for walk-style sampling.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  double next_unit() { return to_unit(next_u64()); }

 private:
  std::uint64_t state_;
};

}  // namespace tibrw::rng
