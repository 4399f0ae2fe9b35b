#include "tibrw/io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

namespace tibrw::io {

using nlohmann::json;

VarianceProfile profile_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("profile: expected a non-empty JSON array");
  }
  std::vector<Segment> segments;
  segments.reserve(j.size());
  for (const auto& item : j) {
    if (!item.contains("t") || !item.contains("var")) {
      throw std::invalid_argument("profile: each segment needs fields \"t\" and \"var\"");
    }
    segments.push_back({item.at("t").get<double>(), item.at("var").get<double>()});
  }
  return VarianceProfile(std::move(segments));
}

json profile_to_json(const VarianceProfile& profile) {
  json j = json::array();
  for (const Segment& seg : profile.segments()) {
    j.push_back({{"t", seg.fraction}, {"var", seg.variance}});
  }
  return j;
}

VarianceProfile profile_from_arg(const std::string& arg) {
  std::string text = arg;
  if (arg.find('[') == std::string::npos) {
    std::ifstream in(arg);
    if (!in) throw std::invalid_argument("profile: cannot open file '" + arg + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  return profile_from_json(json::parse(text));
}

json prediction_to_json(const Prediction& prediction) {
  return {{"model", to_string(prediction.model)},
          {"velocity", prediction.velocity},
          {"log_coeff", prediction.log_coeff},
          {"sigma_eff", prediction.sigma_eff},
          {"beta", prediction.beta}};
}

json fit_to_json(const FitResult& fit) {
  json residuals = json::array();
  for (const FitPoint& r : fit.residuals) {
    residuals.push_back({{"n", r.n}, {"residual", r.median}});
  }
  json cov = json::array();
  for (const auto& row : fit.covariance) {
    cov.push_back({row[0], row[1], row[2]});
  }
  return {{"a", fit.a},
          {"b", fit.b},
          {"c", fit.c},
          {"beta_hat", fit.beta_hat},
          {"constrained", fit.constrained},
          {"residuals", residuals},
          {"covariance", cov}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<FitPoint> fit_points_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("fit: cannot open '" + path + "'");
  std::vector<FitPoint> points;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double n, median;
    if (row >> n >> median) {
      points.push_back({n, median});
    } else if (!points.empty()) {
      throw std::invalid_argument("fit: malformed CSV row '" + line + "'");
    }
    // else: header line, skip
  }
  if (points.empty()) throw std::invalid_argument("fit: no (n, median) rows in " + path);
  return points;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

void write_manifest(const std::string& path, const std::string& command,
                    const json& config, double wall_time_s,
                    const std::vector<std::string>& outputs) {
  const json manifest = {{"command", command},
                         {"version", kVersion},
                         {"config", config},
                         {"wall_time_s", wall_time_s},
                         {"outputs", outputs}};
  write_text_file(path, manifest.dump(2) + "\n");
}

}  // namespace tibrw::io
