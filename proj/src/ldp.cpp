#include "tibrw/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tibrw {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Merged, sorted knot set: path breakpoints plus profile boundaries.
std::vector<double> merged_knots(const VarianceProfile& profile,
                                 const PiecewiseLinearPath& path) {
  std::vector<double> s;
  for (const PathPoint& p : path.breakpoints()) s.push_back(p.s);
  double cum = 0.0;
  for (const Segment& seg : profile.segments()) {
    cum += seg.fraction;
    s.push_back(std::min(cum, 1.0));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(),
                      [](double a, double b) { return std::abs(a - b) <= 1e-15; }),
          s.end());
  return s;
}

double variance_on(const VarianceProfile& profile, double s_mid) {
  double cum = 0.0;
  for (const Segment& seg : profile.segments()) {
    cum += seg.fraction;
    if (s_mid < cum) return seg.variance;
  }
  return profile.segments().back().variance;
}

double slope_on(const PiecewiseLinearPath& path, double s_mid) {
  const auto& pts = path.breakpoints();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (s_mid < pts[i].s) {
      return (pts[i].value - pts[i - 1].value) / (pts[i].s - pts[i - 1].s);
    }
  }
  const std::size_t m = pts.size();
  return (pts[m - 1].value - pts[m - 2].value) / (pts[m - 1].s - pts[m - 2].s);
}

}  // namespace

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<PathPoint> breakpoints)
    : points_(std::move(breakpoints)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("PiecewiseLinearPath: need at least two breakpoints");
  }
  if (points_.front().s != 0.0 || std::abs(points_.front().value) > 1e-12) {
    throw std::invalid_argument("PiecewiseLinearPath: must start at (0,0)");
  }
  points_.front().value = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].s > points_[i - 1].s)) {
      throw std::invalid_argument("PiecewiseLinearPath: s must be strictly increasing");
    }
  }
  if (std::abs(points_.back().s - 1.0) > 1e-12) {
    throw std::invalid_argument("PiecewiseLinearPath: last breakpoint must be at s=1");
  }
  points_.back().s = 1.0;
}

double PiecewiseLinearPath::value_at(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return points_.back().value;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (s <= points_[i].s) {
      const double t = (s - points_[i - 1].s) / (points_[i].s - points_[i - 1].s);
      return points_[i - 1].value + t * (points_[i].value - points_[i - 1].value);
    }
  }
  return points_.back().value;
}

double rate(const VarianceProfile& profile, const PiecewiseLinearPath& path, double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument("rate: s must lie in [0,1]");
  }
  double total = 0.0;
  const std::vector<double> knots = merged_knots(profile, path);
  double lo = 0.0;
  for (double hi : knots) {
    if (hi <= 0.0) continue;
    const double cap = std::min(hi, s);
    if (cap <= lo) break;
    const double mid = 0.5 * (lo + cap);
    const double m = slope_on(path, mid);
    total += (cap - lo) * m * m / (2.0 * variance_on(profile, mid));
    lo = cap;
    if (lo >= s) break;
  }
  return total;
}

RateReport feasible(const VarianceProfile& profile, const PiecewiseLinearPath& path) {
  RateReport report;
  const std::vector<double> knots = merged_knots(profile, path);
  double cum_rate = 0.0;
  double lo = 0.0;
  report.cumulative.push_back({0.0, 0.0, 0.0});
  report.slack = 0.0;
  report.slack_location = 0.0;
  for (double hi : knots) {
    if (hi <= 0.0) continue;
    const double mid = 0.5 * (lo + hi);
    const double m = slope_on(path, mid);
    cum_rate += (hi - lo) * m * m / (2.0 * variance_on(profile, mid));
    const double slack = hi * kLn2 - cum_rate;
    report.cumulative.push_back({hi, cum_rate, slack});
    if (slack < report.slack) {
      report.slack = slack;
      report.slack_location = hi;
    }
    lo = hi;
  }
  report.feasible = report.slack >= -1e-12;
  return report;
}

namespace {

PiecewiseLinearPath path_from_slopes(const VarianceProfile& profile,
                                     const std::vector<double>& slopes) {
  std::vector<PathPoint> pts;
  pts.push_back({0.0, 0.0});
  double s = 0.0, v = 0.0;
  for (std::size_t j = 0; j < slopes.size(); ++j) {
    s += profile.segments()[j].fraction;
    v += profile.segments()[j].fraction * slopes[j];
    pts.push_back({std::min(s, 1.0), v});
  }
  pts.back().s = 1.0;
  return PiecewiseLinearPath(std::move(pts));
}

// Exact KKT candidate for a given active set of prefix constraints.
//
// With actives J_1 < ... < J_m = k splitting the segments into blocks, the
// stationarity conditions force m_j = sigma_j^2 * mu_b on block b with
//   mu_b = sqrt(2 log2 * L_b / A_b),   L_b = sum t_j,  A_b = sum t_j sigma_j^2,
// which makes each active cumulative constraint exactly tight. A candidate
// is kept only if all remaining prefix constraints hold.
struct KktCandidate {
  std::vector<double> slopes;
  double speed = -1.0;
  bool ok = false;
};

KktCandidate kkt_candidate(const std::vector<double>& t, const std::vector<double>& var,
                           unsigned active_mask) {
  const std::size_t k = t.size();
  KktCandidate cand;
  cand.slopes.resize(k);
  std::size_t block_start = 0;
  double speed = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const bool active = (j + 1 == k) || ((active_mask >> j) & 1u);
    if (!active) continue;
    double time_mass = 0.0, var_mass = 0.0;
    for (std::size_t i = block_start; i <= j; ++i) {
      time_mass += t[i];
      var_mass += t[i] * var[i];
    }
    const double mu = std::sqrt(2.0 * kLn2 * time_mass / var_mass);
    for (std::size_t i = block_start; i <= j; ++i) cand.slopes[i] = var[i] * mu;
    speed += mu * var_mass;
    block_start = j + 1;
  }
  // Primal feasibility of every prefix.
  double cost = 0.0, budget = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    cost += t[j] * cand.slopes[j] * cand.slopes[j] / (2.0 * var[j]);
    budget += t[j] * kLn2;
    if (cost > budget + 1e-12) return cand;
  }
  cand.speed = speed;
  cand.ok = true;
  return cand;
}

std::vector<double> kkt_active_set_slopes(const VarianceProfile& profile) {
  const std::size_t k = profile.phases();
  if (k > 16) {
    throw std::invalid_argument("optimal_curve: more than 16 segments not supported");
  }
  std::vector<double> t(k), var(k);
  for (std::size_t j = 0; j < k; ++j) {
    t[j] = profile.segments()[j].fraction;
    var[j] = profile.segments()[j].variance;
  }
  KktCandidate best;
  for (unsigned mask = 0; mask < (1u << (k - 1)); ++mask) {
    KktCandidate cand = kkt_candidate(t, var, mask);
    if (cand.ok && cand.speed > best.speed) best = std::move(cand);
  }
  if (!best.ok) {
    throw std::runtime_error("optimal_curve: active-set search found no feasible candidate");
  }
  return best.slopes;
}

}  // namespace

OptimalCurve optimal_curve(const VarianceProfile& profile) {
  const std::size_t k = profile.phases();
  const Regime regime = classify(profile);
  std::vector<double> slopes(k);

  if (regime == Regime::Homogeneous) {
    const double m = std::sqrt(2.0 * kLn2 * profile.segments().front().variance);
    std::fill(slopes.begin(), slopes.end(), m);
  } else if (regime == Regime::Increasing) {
    // Only the final constraint binds: one block, m_j = sigma_j^2 * mu. For
    // two equal phases this is exactly the textbook increasing-case curve.
    const double mu = std::sqrt(2.0 * kLn2 / profile.mean_variance());
    for (std::size_t j = 0; j < k; ++j) slopes[j] = profile.segments()[j].variance * mu;
  } else if (regime == Regime::Decreasing) {
    // Every cumulative constraint binds: each phase runs at its own
    // homogeneous speed, the greedy structure.
    const double root = std::sqrt(2.0 * kLn2);
    for (std::size_t j = 0; j < k; ++j) {
      slopes[j] = root * std::sqrt(profile.segments()[j].variance);
    }
  } else {
    slopes = kkt_active_set_slopes(profile);
  }

  OptimalCurve result{path_from_slopes(profile, slopes), 0.0};
  result.speed = result.path.terminal();
  return result;
}

}  // namespace tibrw
