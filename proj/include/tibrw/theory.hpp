#pragma once
// Closed-form asymptotics for the maximal displacement.
//
// Every model is reported in the common two-term form
//   Med(M_n) = velocity * n - log_coeff * log n + O(1),
// with velocity = sqrt(2 log 2) * sigma_eff and
// log_coeff = beta * sigma_eff / sqrt(2 log 2).

#include "tibrw/env.hpp"

namespace tibrw {

enum class Model { Homogeneous, Increasing, Decreasing, Independent, Greedy };

struct Prediction {
  double velocity;
  double log_coeff;
  double sigma_eff;
  double beta;
  Model model;
};

// Dispatch on the model tag:
//   Homogeneous  sigma_eff = sigma,                 beta = 3/2
//   Increasing   sigma_eff = sqrt(sum t_i s_i^2),   beta = 1/2
//   Decreasing   sigma_eff = sum t_i s_i,           log_coeff = (3/2) sum s_i / sqrt(2 log 2)
//   Independent  as Increasing, any profile
//   Greedy       as Decreasing, any profile (phase-wise homogeneous sums)
// Homogeneous/Increasing/Decreasing require the matching regime.
Prediction predict(const VarianceProfile& profile, Model model);

// velocity * n - log_coeff * log n (natural log); n >= 2, real-valued so the
// identity at n = e is expressible.
double evaluate_centering(const Prediction& prediction, double n);

const char* to_string(Model model);
Model model_from_string(const char* name);

}  // namespace tibrw
