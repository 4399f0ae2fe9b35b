// Experiment runner: predictions, LDP solutions, simulations, lemma
// estimators, median fits, and canned verification recipes.
//
// Exit codes: 0 ok, 2 config error, 3 runtime diagnostic failure.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tibrw/brw.hpp"
#include "tibrw/env.hpp"
#include "tibrw/fit.hpp"
#include "tibrw/io.hpp"
#include "tibrw/ldp.hpp"
#include "tibrw/recipes.hpp"
#include "tibrw/theory.hpp"
#include "tibrw/walks.hpp"

namespace {

using nlohmann::json;
using tibrw::io::format_double;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void emit(const json& j, const std::optional<std::string>& out_path,
          const std::string& command, const json& config, const Timer& timer) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (out_path) {
    tibrw::io::write_text_file(*out_path, text);
    tibrw::io::write_manifest(*out_path + ".manifest.json", command, config,
                              timer.seconds(), {*out_path});
  }
}

std::string csv_mc_rows(const std::string& param_name,
                        const std::vector<std::tuple<long, double, tibrw::McEstimate>>& rows,
                        long trials, std::uint64_t seed) {
  std::ostringstream csv;
  csv << "n," << param_name << ",estimate,std_error,trials,seed\n";
  for (const auto& [n, param, est] : rows) {
    csv << n << ',' << format_double(param) << ',' << format_double(est.estimate) << ','
        << format_double(est.std_error) << ',' << trials << ',' << seed << "\n";
  }
  return csv.str();
}

int run(int argc, char** argv) {
  CLI::App app{"time-inhomogeneous branching random walk toolkit"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  // ---- predict ----
  auto* predict_cmd = app.add_subcommand("predict", "closed-form asymptotics");
  std::string profile_arg, model_arg;
  std::optional<std::string> out_path;
  predict_cmd->add_option("--profile", profile_arg, "profile JSON (inline or file)")
      ->required();
  predict_cmd->add_option("--model", model_arg,
                          "homogeneous|increasing|decreasing|independent|greedy")
      ->required();
  predict_cmd->add_option("--out", out_path, "write JSON here (plus manifest)");

  // ---- ldp-solve ----
  auto* ldp_cmd = app.add_subcommand("ldp-solve", "optimal-speed LDP solver");
  std::string ldp_profile;
  std::optional<std::string> ldp_out, ldp_csv;
  int grid_points = 201;
  ldp_cmd->add_option("--profile", ldp_profile, "profile JSON")->required();
  ldp_cmd->add_option("--out", ldp_out, "write JSON here");
  ldp_cmd->add_option("--csv", ldp_csv, "write (s, phi, I_s, s log2) grid CSV here");
  ldp_cmd->add_option("--grid-points", grid_points, "CSV grid resolution");

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "simulate maxima");
  std::string sim_profile, mode_arg;
  long sim_n = 0, sim_trials = 0;
  std::uint64_t sim_seed = 0;
  std::optional<double> sim_window;
  std::optional<long> sim_cap;
  std::optional<std::string> sim_out;
  sim_cmd->add_option("--profile", sim_profile, "profile JSON")->required();
  sim_cmd->add_option("--n", sim_n, "walk length")->required();
  sim_cmd->add_option("--mode", mode_arg, "exact|pruned|greedy|independent")->required();
  sim_cmd->add_option("--trials", sim_trials, "number of trials")->required();
  sim_cmd->add_option("--seed", sim_seed, "master seed (mandatory)")->required();
  sim_cmd->add_option("--window", sim_window, "pruning window (default 18 (n/2)^{2/3})");
  sim_cmd->add_option("--cap", sim_cap, "population cap (default 1e6)");
  sim_cmd->add_option("--out", sim_out, "CSV output path (plus summary + manifest)");

  // ---- envelope-check ----
  auto* env_cmd = app.add_subcommand("envelope-check", "fluctuation envelope estimator");
  std::string env_profile;
  std::vector<long> env_ns;
  double env_cf = 6.0;
  long env_trials = 10000;
  std::uint64_t env_seed = 0;
  std::optional<std::string> env_out;
  env_cmd->add_option("--profile", env_profile, "profile JSON")->required();
  env_cmd->add_option("--n", env_ns, "walk lengths")->required();
  env_cmd->add_option("--cf", env_cf, "envelope constant c_f");
  env_cmd->add_option("--trials", env_trials, "trials per n");
  env_cmd->add_option("--seed", env_seed, "master seed")->required();
  env_cmd->add_option("--out", env_out, "CSV output path");

  // ---- barrier-check ----
  auto* bar_cmd = app.add_subcommand("barrier-check", "bridge barrier estimator");
  std::vector<long> bar_ns;
  double bar_y = 1.0, bar_coeff = 100.0;
  long bar_trials = 100000;
  std::uint64_t bar_seed = 0;
  std::optional<std::string> bar_out;
  bar_cmd->add_option("--n", bar_ns, "walk lengths (even)")->required();
  bar_cmd->add_option("--y", bar_y, "barrier offset y >= 0");
  bar_cmd->add_option("--coeff", bar_coeff, "log coefficient (default 100)");
  bar_cmd->add_option("--trials", bar_trials, "trials per n");
  bar_cmd->add_option("--seed", bar_seed, "master seed")->required();
  bar_cmd->add_option("--out", bar_out, "CSV output path");

  // ---- fit ----
  auto* fit_cmd = app.add_subcommand("fit", "two-term median regression");
  std::string fit_input;
  std::optional<double> fit_sigma;
  std::optional<std::string> fit_out;
  fit_cmd->add_option("--input", fit_input, "CSV of (n, median)")->required();
  fit_cmd->add_option("--sigma-eff", fit_sigma, "pin a to sqrt(2 log2) sigma_eff");
  fit_cmd->add_option("--out", fit_out, "write JSON here");

  // ---- recipe ----
  auto* rec_cmd = app.add_subcommand("recipe", "canned verification pipelines");
  std::string recipe_name;
  rec_cmd->add_option("name", recipe_name,
                      "thm1|thm2|greedy-gap|lemma2|lemma3|independent-beta")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Timer timer;

  if (*predict_cmd) {
    const tibrw::VarianceProfile profile = tibrw::io::profile_from_arg(profile_arg);
    const tibrw::Prediction pred =
        tibrw::predict(profile, tibrw::model_from_string(model_arg.c_str()));
    const json config = {{"profile", tibrw::io::profile_to_json(profile)},
                         {"model", model_arg}};
    emit(tibrw::io::prediction_to_json(pred), out_path, "predict", config, timer);
    return 0;
  }

  if (*ldp_cmd) {
    const tibrw::VarianceProfile profile = tibrw::io::profile_from_arg(ldp_profile);
    const tibrw::OptimalCurve curve = tibrw::optimal_curve(profile);
    json breakpoints = json::array();
    for (const tibrw::PathPoint& p : curve.path.breakpoints()) {
      breakpoints.push_back({p.s, p.value});
    }
    const json config = {{"profile", tibrw::io::profile_to_json(profile)},
                         {"grid_points", grid_points}};
    if (ldp_csv) {
      std::ostringstream csv;
      csv << "s,phi,rate,budget\n";
      for (int i = 0; i < grid_points; ++i) {
        const double s = static_cast<double>(i) / (grid_points - 1);
        csv << format_double(s) << ',' << format_double(curve.path.value_at(s)) << ','
            << format_double(tibrw::rate(profile, curve.path, s)) << ','
            << format_double(s * std::log(2.0)) << "\n";
      }
      tibrw::io::write_text_file(*ldp_csv, csv.str());
      tibrw::io::write_manifest(*ldp_csv + ".manifest.json", "ldp-solve", config,
                                timer.seconds(), {*ldp_csv});
    }
    emit({{"speed", curve.speed}, {"breakpoints", breakpoints}}, ldp_out, "ldp-solve",
         config, timer);
    return 0;
  }

  if (*sim_cmd) {
    tibrw::SimMode mode;
    if (mode_arg == "exact") {
      mode = tibrw::SimMode::Exact;
    } else if (mode_arg == "pruned") {
      mode = tibrw::SimMode::Pruned;
    } else if (mode_arg == "greedy") {
      mode = tibrw::SimMode::Greedy;
    } else if (mode_arg == "independent") {
      mode = tibrw::SimMode::IndependentExact;
    } else {
      throw std::invalid_argument("unknown mode '" + mode_arg + "'");
    }
    const tibrw::VarianceProfile profile = tibrw::io::profile_from_arg(sim_profile);
    const tibrw::TrialConfig config{profile,  sim_n,      mode,   sim_seed,
                                    sim_trials, sim_window, sim_cap};
    const tibrw::MaxSample sample = tibrw::simulate(config, threads);

    std::vector<double> sorted = sample.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    const double median = m % 2 == 1 ? sorted[m / 2]
                                     : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(m);
    const double q1 = sorted[static_cast<std::size_t>(0.25 * (m - 1))];
    const double q3 = sorted[static_cast<std::size_t>(0.75 * (m - 1))];
    const json summary = {{"median", median}, {"mean", mean},   {"iqr", q3 - q1},
                          {"trials", sim_trials}, {"seed", sim_seed},
                          {"capped_trials", sample.capped_count()}};
    const json config_json = {{"profile", tibrw::io::profile_to_json(profile)},
                              {"n", sim_n},
                              {"mode", mode_arg},
                              {"trials", sim_trials},
                              {"seed", sim_seed},
                              {"window", sim_window ? json(*sim_window) : json()},
                              {"cap", sim_cap ? json(*sim_cap) : json()},
                              {"threads", threads}};
    if (sim_out) {
      std::ostringstream csv;
      csv << "trial,value,capped\n";
      for (std::size_t i = 0; i < sample.values.size(); ++i) {
        csv << i << ',' << format_double(sample.values[i]) << ','
            << static_cast<int>(sample.capped[i]) << "\n";
      }
      tibrw::io::write_text_file(*sim_out, csv.str());
      tibrw::io::write_text_file(*sim_out + ".summary.json", summary.dump(2) + "\n");
      tibrw::io::write_manifest(*sim_out + ".manifest.json", "simulate", config_json,
                                timer.seconds(), {*sim_out, *sim_out + ".summary.json"});
    }
    std::cout << summary.dump(2) << "\n";
    const double capped_rate = static_cast<double>(sample.capped_count()) /
                               static_cast<double>(sample.values.size());
    if (mode == tibrw::SimMode::Pruned && capped_rate > 0.5) {
      std::cerr << "diagnostic: population cap hit in " << 100.0 * capped_rate
                << "% of trials; medians may understate the maximum (raise --cap)\n";
      return 3;
    }
    return 0;
  }

  if (*env_cmd) {
    const tibrw::VarianceProfile profile = tibrw::io::profile_from_arg(env_profile);
    std::vector<std::tuple<long, double, tibrw::McEstimate>> rows;
    for (long n : env_ns) {
      const tibrw::BridgeSpec spec(profile, n, env_cf);
      rows.emplace_back(n, env_cf,
                        tibrw::envelope_probability(spec, env_trials, env_seed, threads));
    }
    const std::string csv = csv_mc_rows("c_f", rows, env_trials, env_seed);
    std::cout << csv;
    if (env_out) {
      tibrw::io::write_text_file(*env_out, csv);
      const json config = {{"profile", tibrw::io::profile_to_json(profile)},
                           {"n", env_ns}, {"cf", env_cf}, {"trials", env_trials},
                           {"seed", env_seed}};
      tibrw::io::write_manifest(*env_out + ".manifest.json", "envelope-check", config,
                                timer.seconds(), {*env_out});
    }
    return 0;
  }

  if (*bar_cmd) {
    std::vector<std::tuple<long, double, tibrw::McEstimate>> rows;
    for (long n : bar_ns) {
      const tibrw::BarrierSpec spec(n, bar_y, bar_coeff);
      rows.emplace_back(n, bar_y,
                        tibrw::bb_barrier_probability(spec, bar_trials, bar_seed, threads));
    }
    const std::string csv = csv_mc_rows("y", rows, bar_trials, bar_seed);
    std::cout << csv;
    if (bar_out) {
      tibrw::io::write_text_file(*bar_out, csv);
      const json config = {{"n", bar_ns}, {"y", bar_y}, {"coeff", bar_coeff},
                           {"trials", bar_trials}, {"seed", bar_seed}};
      tibrw::io::write_manifest(*bar_out + ".manifest.json", "barrier-check", config,
                                timer.seconds(), {*bar_out});
    }
    return 0;
  }

  if (*fit_cmd) {
    const std::vector<tibrw::FitPoint> points = tibrw::io::fit_points_from_csv(fit_input);
    const tibrw::FitResult result = tibrw::fit_correction(points, fit_sigma);
    const json config = {{"input", fit_input},
                         {"sigma_eff", fit_sigma ? json(*fit_sigma) : json()}};
    emit(tibrw::io::fit_to_json(result), fit_out, "fit", config, timer);
    return 0;
  }

  if (*rec_cmd) {
    const tibrw::accept::CheckResult result = tibrw::accept::run_recipe(recipe_name, threads);
    for (const std::string& line : result.lines) std::cout << line << "\n";
    std::cout << (result.pass ? "PASS" : "FAIL") << "  " << result.name << "\n";
    return result.pass ? 0 : 1;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
