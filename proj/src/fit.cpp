#include "tibrw/fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tibrw {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kZ95 = 1.959963984540054;

double quantile_type7(std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

// Least squares by Householder QR with column equilibration; m x p, p <= 3.
// Returns coefficients and (X^T X)^{-1} scaled back to original columns.
struct LsqResult {
  std::array<double, 3> coef{};
  std::array<std::array<double, 3>, 3> xtx_inv{};
  double rss = 0.0;
};

LsqResult solve_lsq(std::vector<std::array<double, 3>> x, std::vector<double> y,
                    std::size_t p) {
  const std::size_t m = x.size();
  std::array<double, 3> colscale{1.0, 1.0, 1.0};
  for (std::size_t j = 0; j < p; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm += x[i][j] * x[i][j];
    norm = std::sqrt(norm);
    if (norm == 0.0) throw std::invalid_argument("fit: zero design column");
    colscale[j] = norm;
    for (std::size_t i = 0; i < m; ++i) x[i][j] /= norm;
  }

  // Householder triangularization of [X | y].
  std::array<std::array<double, 3>, 3> r{};
  for (std::size_t j = 0; j < p; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += x[i][j] * x[i][j];
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      throw std::invalid_argument("fit: rank-deficient design (n values too clustered)");
    }
    const double alpha = x[j][j] > 0.0 ? -norm : norm;
    double vnorm2 = 0.0;
    std::vector<double> v(m - j, 0.0);
    v[0] = x[j][j] - alpha;
    for (std::size_t i = j + 1; i < m; ++i) v[i - j] = x[i][j];
    for (double vi : v) vnorm2 += vi * vi;
    if (vnorm2 > 0.0) {
      for (std::size_t col = j; col < p; ++col) {
        double dot = 0.0;
        for (std::size_t i = j; i < m; ++i) dot += v[i - j] * x[i][col];
        const double f = 2.0 * dot / vnorm2;
        for (std::size_t i = j; i < m; ++i) x[i][col] -= f * v[i - j];
      }
      double dot = 0.0;
      for (std::size_t i = j; i < m; ++i) dot += v[i - j] * y[i];
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < m; ++i) y[i] -= f * v[i - j];
    }
    for (std::size_t col = j; col < p; ++col) r[j][col] = x[j][col];
  }

  LsqResult out;
  // Back substitution.
  for (std::size_t jj = p; jj-- > 0;) {
    double s = y[jj];
    for (std::size_t col = jj + 1; col < p; ++col) s -= r[jj][col] * out.coef[col];
    out.coef[jj] = s / r[jj][jj];
  }
  for (std::size_t i = p; i < m; ++i) out.rss += y[i] * y[i];

  // (X^T X)^{-1} = R^{-1} R^{-T} in the scaled basis.
  std::array<std::array<double, 3>, 3> rinv{};
  for (std::size_t j = 0; j < p; ++j) {
    rinv[j][j] = 1.0 / r[j][j];
    for (std::size_t i = j; i-- > 0;) {
      double s = 0.0;
      for (std::size_t t = i + 1; t <= j; ++t) s += r[i][t] * rinv[t][j];
      rinv[i][j] = -s / r[i][i];
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t t = std::max(i, j); t < p; ++t) s += rinv[i][t] * rinv[j][t];
      out.xtx_inv[i][j] = s / (colscale[i] * colscale[j]);
    }
  }
  for (std::size_t j = 0; j < p; ++j) out.coef[j] /= colscale[j];
  return out;
}

}  // namespace

MedianEstimate estimate_median(std::span<const double> values) {
  const std::size_t m = values.size();
  if (m < 50) throw std::invalid_argument("estimate_median: need at least 50 trials");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double median = (m % 2 == 1)
                            ? sorted[m / 2]
                            : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  // 95% CI from binomial order-statistic ranks around m/2.
  const double spread = kZ95 * 0.5 * std::sqrt(static_cast<double>(m));
  const auto lo = static_cast<std::size_t>(
      std::max(0.0, std::floor(static_cast<double>(m) / 2.0 - spread) - 1.0));
  const auto hi = std::min(m - 1, static_cast<std::size_t>(std::ceil(
                                      static_cast<double>(m) / 2.0 + spread)));
  return {median, 0.5 * (sorted[hi] - sorted[lo])};
}

FitResult fit_correction(const std::vector<FitPoint>& points,
                         std::optional<double> sigma_eff_known) {
  std::set<double> distinct;
  double n_min = 0.0, n_max = 0.0;
  for (const FitPoint& pt : points) {
    if (!(pt.n >= 2.0)) throw std::invalid_argument("fit_correction: need n >= 2");
    distinct.insert(pt.n);
    n_min = n_min == 0.0 ? pt.n : std::min(n_min, pt.n);
    n_max = std::max(n_max, pt.n);
  }
  if (distinct.size() < 4) {
    throw std::invalid_argument("fit_correction: need at least 4 distinct n");
  }
  if (n_max < 8.0 * n_min) {
    throw std::invalid_argument("fit_correction: n must span at least a factor of 8");
  }

  const std::size_t m = points.size();
  FitResult out{};
  out.constrained = sigma_eff_known.has_value();

  std::vector<std::array<double, 3>> design(m);
  std::vector<double> rhs(m);
  if (out.constrained) {
    const double a0 = std::sqrt(2.0 * kLn2) * *sigma_eff_known;
    for (std::size_t i = 0; i < m; ++i) {
      design[i] = {-std::log(points[i].n), 1.0, 0.0};
      rhs[i] = points[i].median - a0 * points[i].n;
    }
    const LsqResult ls = solve_lsq(design, rhs, 2);
    out.a = a0;
    out.b = ls.coef[0];
    out.c = ls.coef[1];
    const double dof = m > 2 ? static_cast<double>(m - 2) : 1.0;
    const double s2 = ls.rss / dof;
    out.covariance = {};
    out.covariance[1][1] = s2 * ls.xtx_inv[0][0];
    out.covariance[1][2] = out.covariance[2][1] = s2 * ls.xtx_inv[0][1];
    out.covariance[2][2] = s2 * ls.xtx_inv[1][1];
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      design[i] = {points[i].n, -std::log(points[i].n), 1.0};
      rhs[i] = points[i].median;
    }
    const LsqResult ls = solve_lsq(design, rhs, 3);
    out.a = ls.coef[0];
    out.b = ls.coef[1];
    out.c = ls.coef[2];
    const double dof = m > 3 ? static_cast<double>(m - 3) : 1.0;
    const double s2 = ls.rss / dof;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) out.covariance[i][j] = s2 * ls.xtx_inv[i][j];
    }
  }
  // beta_hat = b sqrt(2 log2)/sigma_eff_hat with sigma_eff_hat = a/sqrt(2 log2).
  out.beta_hat = out.b * 2.0 * kLn2 / out.a;
  out.residuals.reserve(m);
  for (const FitPoint& pt : points) {
    out.residuals.push_back(
        {pt.n, pt.median - (out.a * pt.n - out.b * std::log(pt.n) + out.c)});
  }
  return out;
}

TightnessReport tightness_check(const std::vector<TightnessBatch>& batches) {
  if (batches.size() < 3) {
    throw std::invalid_argument("tightness_check: need at least 3 values of n");
  }
  TightnessReport report;
  double iqr_min = 0.0, iqr_max = 0.0;
  for (const TightnessBatch& batch : batches) {
    if (batch.values.size() < 500) {
      throw std::invalid_argument("tightness_check: need >= 500 trials per n");
    }
    std::vector<double> sorted(batch.values.begin(), batch.values.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
    report.iqr_by_n.emplace_back(batch.n, iqr);
    iqr_min = iqr_min == 0.0 ? iqr : std::min(iqr_min, iqr);
    iqr_max = std::max(iqr_max, iqr);
  }
  report.ratio = iqr_max / iqr_min;
  report.flagged = report.ratio > 2.0;
  return report;
}

}  // namespace tibrw
