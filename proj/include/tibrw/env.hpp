#pragma once
// Piecewise-constant variance environments.
//
// A profile is an ordered list of (fraction, variance) segments covering the
// macroscopic time interval [0,1]. For a walk of length n, segment j governs
// the increments taken on steps [b_{j-1}, b_j) where b_j = (cumulative
// fraction) * n; n must make every boundary integral, so the phase change
// never silently shifts.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tibrw {

struct Segment {
  double fraction;
  double variance;
};

class VarianceProfile {
 public:
  explicit VarianceProfile(std::vector<Segment> segments);

  static VarianceProfile homogeneous(double variance);
  static VarianceProfile two_phase(double first_variance, double second_variance);

  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t phases() const { return segments_.size(); }

  bool compatible_with(long n) const;
  void require_compatible(long n) const;

  // Variance of the increment taken at time step -> step+1, 0 <= step < n.
  double variance_at(long step, long n) const;

  // Step indices of segment boundaries: 0 = b_0 < b_1 < ... < b_k = n.
  std::vector<long> boundaries(long n) const;

  double mean_variance() const;  // sum t_i sigma_i^2
  double mean_sigma() const;     // sum t_i sigma_i
  double sum_sigma() const;      // sum sigma_i
  double total_variance(long n) const { return mean_variance() * static_cast<double>(n); }

  VarianceProfile reversed() const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> cum_fraction_;  // size k, last element exactly 1
};

enum class Regime { Homogeneous, Increasing, Decreasing, General };

Regime classify(const VarianceProfile& profile);

const char* to_string(Regime regime);

}  // namespace tibrw
