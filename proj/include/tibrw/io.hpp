#pragma once
// Config and artifact serialization: profiles as JSON arrays of
// {"t": fraction, "var": variance}, CSV emission with stable formatting, and
// the run manifest written next to every output file.

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "tibrw/env.hpp"
#include "tibrw/fit.hpp"
#include "tibrw/theory.hpp"

namespace tibrw::io {

inline constexpr const char* kVersion = "0.1.0";

VarianceProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const VarianceProfile& profile);

// Accepts inline JSON (leading '[') or a path to a JSON file.
VarianceProfile profile_from_arg(const std::string& arg);

nlohmann::json prediction_to_json(const Prediction& prediction);
nlohmann::json fit_to_json(const FitResult& fit);

// Shortest representation that round-trips a double.
std::string format_double(double x);

// Rows of (n, median) from a CSV file; a non-numeric first line is treated
// as a header.
std::vector<FitPoint> fit_points_from_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

// Manifest JSON (config echo, version, seed, wall time) at <path>.
void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::json& config, double wall_time_s,
                    const std::vector<std::string>& outputs);

}  // namespace tibrw::io
