#include "tibrw/gauss.hpp"

#include <cmath>
#include <stdexcept>

namespace tibrw::gauss {

namespace {

// log of 1 - 1/z^2 + 3/z^4 - 15/z^6 + ... truncated where the terms stop
// mattering for z >= 30.
double log_tail_series(double z) {
  const double y = 1.0 / (z * z);
  const double s =
      -y * (1.0 - y * (3.0 - y * (15.0 - y * (105.0 - y * (945.0 - y * 10395.0)))));
  return std::log1p(s);
}

double log_pdf(double z) { return -0.5 * z * z - 0.5 * kLog2Pi; }

}  // namespace

double log_sf(double z) {
  if (z < 0.0) {
    // Q(z) = 1 - Q(-z)
    return std::log1p(-sf(-z));
  }
  if (z <= 30.0) {
    return std::log(0.5 * std::erfc(z * kInvSqrt2));
  }
  return log_pdf(z) - std::log(z) + log_tail_series(z);
}

double sf(double z) {
  if (z < 0.0) return 1.0 - sf(-z);
  if (z <= 30.0) return 0.5 * std::erfc(z * kInvSqrt2);
  return std::exp(log_sf(z));
}

namespace detail {

void throw_quantile_domain() {
  throw std::domain_error("quantile: p must lie strictly inside (0,1)");
}

}  // namespace detail

double quantile(double p) {
  double x = quantile_fast(p);
  if (std::abs(x) > 36.0) return x;  // erfc would underflow; Acklam is all we get
  const double e = 0.5 * std::erfc(-x * kInvSqrt2) - p;
  const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double upper_quantile_from_log_sf(double log_w) {
  if (!(log_w <= -0.6931471805599453 + 1e-12)) {
    throw std::domain_error("upper_quantile_from_log_sf: need log w <= log(1/2)");
  }
  double z;
  if (log_w >= -690.0) {
    // w representable: Q(z) = w <=> Phi(-z) = w.
    z = -quantile_fast(std::exp(log_w));
  } else {
    // Asymptotic seed: z^2/2 + log z + log(2pi)/2 ~ -log w, fixed point on z.
    const double t = -log_w;
    z = std::sqrt(2.0 * t);
    for (int i = 0; i < 4; ++i) {
      z = std::sqrt(2.0 * (t - std::log(z) - 0.5 * kLog2Pi));
    }
  }
  // Newton on g(z) = log Q(z) - log w; g'(z) = -phi(z)/Q(z).
  for (int i = 0; i < 3; ++i) {
    const double lq = log_sf(z);
    z += (lq - log_w) * std::exp(lq - log_pdf(z));
  }
  return z;
}

double quantile_of_root_power(double log_u, int n) {
  if (!(log_u < 0.0)) throw std::domain_error("quantile_of_root_power: need log u < 0");
  if (n < 0) throw std::domain_error("quantile_of_root_power: need n >= 0");
  constexpr double kLn2 = 0.6931471805599453;
  if (n <= 50) {
    const double q = -log_u * std::exp2(-n);  // u^{2^-n} = exp(-q)
    if (q >= kLn2) {
      // target CDF value <= 1/2: lower-tail quantile by symmetry
      return -upper_quantile_from_log_sf(-q);
    }
    return upper_quantile_from_log_sf(std::log(-std::expm1(-q)));
  }
  // q underflows; 1 - exp(-q) = q(1 - q/2 + ...) and only log q is needed.
  const double log_q = std::log(-log_u) - n * kLn2;
  const double q = std::exp(log_q);  // 0 is fine here
  return upper_quantile_from_log_sf(log_q + std::log1p(-0.5 * q));
}

double log_neg_log_cdf(double z) {
  const double lq = log_sf(z);
  if (lq > -18.0) {
    // Q not tiny: -log Phi = -log1p(-Q) directly.
    return std::log(-std::log1p(-std::exp(lq)));
  }
  // -log Phi = Q (1 + Q/2 + Q^2/3 + ...)
  const double q = std::exp(lq);
  return lq + std::log1p(q * (0.5 + q / 3.0));
}

}  // namespace tibrw::gauss
