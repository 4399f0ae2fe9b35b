#pragma once
// Recovering the two-term expansion from medians, plus the tightness check.
//
// The regression model is median ~ a n - b log n + c. Unconstrained it
// identifies beta_hat = b * (2 log 2) / a; with sigma_eff supplied, a is
// pinned to sqrt(2 log 2) sigma_eff and only (b, c) are fitted, which is the
// honest option for noisy BRW data where the log n range is short.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tibrw {

struct MedianEstimate {
  double median;
  double ci_halfwidth;  // 95%, binomial order-statistic ranks
};

MedianEstimate estimate_median(std::span<const double> values);

struct FitPoint {
  double n;
  double median;
};

struct FitResult {
  double a;  // coefficient of n
  double b;  // coefficient of -log n
  double c;  // constant
  double beta_hat;
  bool constrained;
  std::vector<FitPoint> residuals;             // (n, observed - fitted)
  std::array<std::array<double, 3>, 3> covariance;  // of (a, b, c)
};

FitResult fit_correction(const std::vector<FitPoint>& points,
                         std::optional<double> sigma_eff_known = std::nullopt);

struct TightnessBatch {
  long n;
  std::span<const double> values;
};

struct TightnessReport {
  std::vector<std::pair<long, double>> iqr_by_n;
  double ratio;  // max IQR / min IQR
  bool flagged;  // ratio > 2
};

TightnessReport tightness_check(const std::vector<TightnessBatch>& batches);

}  // namespace tibrw
