#pragma once
// Sample-path large-deviation rate functional and the optimal-speed solver.
//
// For a candidate macroscopic path phi on [0,1] the cumulative rate is
//   I_s(phi) = int_0^s phidot(r)^2 / (2 sigma^2(r)) dr,
// and a path can be populated by the branching system only while
// I_s(phi) <= s log 2. The solver maximizes phi(1) under that family of
// constraints; by Jensen's inequality the optimum is linear on every profile
// segment, so the search space is one slope per segment.

#include <vector>

#include "tibrw/env.hpp"

namespace tibrw {

struct PathPoint {
  double s;
  double value;
};

class PiecewiseLinearPath {
 public:
  explicit PiecewiseLinearPath(std::vector<PathPoint> breakpoints);

  const std::vector<PathPoint>& breakpoints() const { return points_; }
  double value_at(double s) const;
  double terminal() const { return points_.back().value; }

 private:
  std::vector<PathPoint> points_;
};

struct RatePoint {
  double s;
  double cumulative_rate;
  double slack;  // s log 2 - I_s
};

struct RateReport {
  std::vector<RatePoint> cumulative;  // at path breakpoints merged with profile boundaries
  bool feasible;
  double slack;           // min over [0,1] of s log2 - I_s
  double slack_location;  // s attaining it
};

// Exact piecewise evaluation of I_s; both slope and variance are constant
// between merged knots, so each interval contributes length * m^2/(2 sigma^2).
double rate(const VarianceProfile& profile, const PiecewiseLinearPath& path, double s);

// I_s and s log2 are affine between merged knots, so checking the knots is
// exact, not an approximation (unit-tested against dense grids).
RateReport feasible(const VarianceProfile& profile, const PiecewiseLinearPath& path);

struct OptimalCurve {
  PiecewiseLinearPath path;  // one linear piece per profile segment
  double speed;              // phi(1)
};

// Closed forms for the homogeneous and two-phase monotone profiles, an exact
// KKT active-set search over the prefix constraints otherwise.
OptimalCurve optimal_curve(const VarianceProfile& profile);

}  // namespace tibrw
