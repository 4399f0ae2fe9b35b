#include "tibrw/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tibrw {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
const double kSqrt2Ln2 = std::sqrt(2.0 * kLn2);

void require_regime(const VarianceProfile& profile, Regime wanted, const char* model) {
  if (classify(profile) != wanted) {
    throw std::invalid_argument(std::string("predict: model '") + model +
                                "' does not match the profile's variance ordering");
  }
}

Prediction make(Model model, double sigma_eff, double log_coeff) {
  Prediction p;
  p.model = model;
  p.sigma_eff = sigma_eff;
  p.velocity = kSqrt2Ln2 * sigma_eff;
  p.log_coeff = log_coeff;
  p.beta = log_coeff * kSqrt2Ln2 / sigma_eff;
  return p;
}

Prediction make_beta(Model model, double sigma_eff, double beta) {
  return make(model, sigma_eff, beta * sigma_eff / kSqrt2Ln2);
}

}  // namespace

Prediction predict(const VarianceProfile& profile, Model model) {
  switch (model) {
    case Model::Homogeneous: {
      require_regime(profile, Regime::Homogeneous, "homogeneous");
      return make_beta(model, std::sqrt(profile.segments().front().variance), 1.5);
    }
    case Model::Increasing: {
      require_regime(profile, Regime::Increasing, "increasing");
      return make_beta(model, std::sqrt(profile.mean_variance()), 0.5);
    }
    case Model::Decreasing: {
      require_regime(profile, Regime::Decreasing, "decreasing");
      return make(model, profile.mean_sigma(), 1.5 * profile.sum_sigma() / kSqrt2Ln2);
    }
    case Model::Independent:
      return make_beta(model, std::sqrt(profile.mean_variance()), 0.5);
    case Model::Greedy:
      // Sum of per-phase homogeneous expansions; t_i enter the velocity only,
      // the log(t_i n) offsets are O(1).
      return make(model, profile.mean_sigma(), 1.5 * profile.sum_sigma() / kSqrt2Ln2);
  }
  throw std::invalid_argument("predict: unknown model");
}

double evaluate_centering(const Prediction& prediction, double n) {
  if (!(n >= 2.0)) {
    throw std::invalid_argument("evaluate_centering: need n >= 2");
  }
  return prediction.velocity * n - prediction.log_coeff * std::log(n);
}

const char* to_string(Model model) {
  switch (model) {
    case Model::Homogeneous: return "homogeneous";
    case Model::Increasing: return "increasing";
    case Model::Decreasing: return "decreasing";
    case Model::Independent: return "independent";
    case Model::Greedy: return "greedy";
  }
  return "?";
}

Model model_from_string(const char* name) {
  const std::string s(name);
  if (s == "homogeneous") return Model::Homogeneous;
  if (s == "increasing") return Model::Increasing;
  if (s == "decreasing") return Model::Decreasing;
  if (s == "independent") return Model::Independent;
  if (s == "greedy") return Model::Greedy;
  throw std::invalid_argument("unknown model '" + s + "'");
}

}  // namespace tibrw
