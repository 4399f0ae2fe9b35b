#include "tibrw/env.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tibrw {

namespace {

bool rel_equal(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

VarianceProfile::VarianceProfile(std::vector<Segment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw std::invalid_argument("VarianceProfile: need at least one segment");
  }
  double cum = 0.0;
  cum_fraction_.reserve(segments_.size());
  for (const Segment& seg : segments_) {
    if (!(seg.fraction > 0.0 && seg.fraction <= 1.0)) {
      throw std::invalid_argument("VarianceProfile: fractions must lie in (0,1]");
    }
    if (!(seg.variance > 0.0)) {
      throw std::invalid_argument("VarianceProfile: variances must be positive");
    }
    cum += seg.fraction;
    cum_fraction_.push_back(cum);
  }
  if (std::abs(cum - 1.0) > 1e-12) {
    throw std::invalid_argument("VarianceProfile: fractions must sum to 1");
  }
  cum_fraction_.back() = 1.0;
}

VarianceProfile VarianceProfile::homogeneous(double variance) {
  return VarianceProfile({{1.0, variance}});
}

VarianceProfile VarianceProfile::two_phase(double first_variance, double second_variance) {
  return VarianceProfile({{0.5, first_variance}, {0.5, second_variance}});
}

bool VarianceProfile::compatible_with(long n) const {
  if (n < 0) return false;
  if (n == 0) return true;
  long prev = 0;
  for (double cf : cum_fraction_) {
    const double exact = cf * static_cast<double>(n);
    const long rounded = std::lround(exact);
    if (std::abs(exact - static_cast<double>(rounded)) > 1e-9) return false;
    if (rounded <= prev && cf < 1.0) return false;  // a segment with zero steps
    prev = rounded;
  }
  return prev == n;
}

void VarianceProfile::require_compatible(long n) const {
  if (!compatible_with(n)) {
    throw std::invalid_argument("VarianceProfile: n=" + std::to_string(n) +
                                " does not put every segment boundary on an integer step");
  }
}

std::vector<long> VarianceProfile::boundaries(long n) const {
  require_compatible(n);
  std::vector<long> b;
  b.reserve(segments_.size() + 1);
  b.push_back(0);
  for (double cf : cum_fraction_) {
    b.push_back(std::lround(cf * static_cast<double>(n)));
  }
  return b;
}

double VarianceProfile::variance_at(long step, long n) const {
  require_compatible(n);
  if (step < 0 || step >= n) {
    throw std::out_of_range("variance_at: step " + std::to_string(step) +
                            " outside [0," + std::to_string(n) + ")");
  }
  // Left-closed / right-open segments in order.
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const long hi = std::lround(cum_fraction_[j] * static_cast<double>(n));
    if (step < hi) return segments_[j].variance;
  }
  return segments_.back().variance;  // unreachable for valid input
}

double VarianceProfile::mean_variance() const {
  double s = 0.0;
  for (const Segment& seg : segments_) s += seg.fraction * seg.variance;
  return s;
}

double VarianceProfile::mean_sigma() const {
  double s = 0.0;
  for (const Segment& seg : segments_) s += seg.fraction * std::sqrt(seg.variance);
  return s;
}

double VarianceProfile::sum_sigma() const {
  double s = 0.0;
  for (const Segment& seg : segments_) s += std::sqrt(seg.variance);
  return s;
}

VarianceProfile VarianceProfile::reversed() const {
  std::vector<Segment> rev(segments_.rbegin(), segments_.rend());
  return VarianceProfile(std::move(rev));
}

Regime classify(const VarianceProfile& profile) {
  const auto& segs = profile.segments();
  bool all_equal = true, increasing = true, decreasing = true;
  for (std::size_t j = 1; j < segs.size(); ++j) {
    const double a = segs[j - 1].variance, b = segs[j].variance;
    if (rel_equal(a, b)) {
      increasing = decreasing = false;
    } else if (a < b) {
      all_equal = decreasing = false;
    } else {
      all_equal = increasing = false;
    }
  }
  if (all_equal) return Regime::Homogeneous;
  if (increasing) return Regime::Increasing;
  if (decreasing) return Regime::Decreasing;
  return Regime::General;
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::Homogeneous: return "homogeneous";
    case Regime::Increasing: return "increasing";
    case Regime::Decreasing: return "decreasing";
    case Regime::General: return "general";
  }
  return "?";
}

}  // namespace tibrw
