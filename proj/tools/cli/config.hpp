#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opplab/forms.hpp"

namespace opplab::cli {

inline const std::vector<std::string> kCommands = {"dichotomy", "witness",    "count",
                                                   "cq",        "rational",   "equidist",
                                                   "projection", "margulis"};

// Every knob of one experiment. Defaults depend on the command; parsing
// fills them in, so a parsed config is complete and serializes canonically.
struct ExperimentConfig {
  std::string command;
  std::optional<TernaryForm> form;

  std::vector<double> R;
  std::vector<double> T;
  std::optional<double> eps;
  double a_exp = 4.0;
  double k_exp = 0.125;
  double grid = 0.1;
  double s_min = -1.0;
  double s_max = 1.0;
  double a = -1.0;
  double b = 1.0;
  double coverage_floor = 0.9;

  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  double delta = 0.05;
  double f_radius = 2.0;

  std::uint64_t points = 0;
  std::optional<std::string> theta;
  std::uint64_t r_grid = 500;
  double alpha = 2.0;
  double b1 = 0.02;
  double scale = 0.02;
  double C = 10.0;
  double c = 10.0;
  double exceptional_mass = 0.05;
  double ell = 1.0;
  std::uint64_t M = 0;
  double radius = 0.1;

  std::optional<std::string> out;
  std::string format = "csv";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Applies the command's defaults and then the keys present in j. Unknown
// keys and out-of-range values throw InvalidArgument.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
// Sorted keys, two-space indent, trailing newline.
std::string canonical_json(const ExperimentConfig& config);

// Command-specific range checks.
void validate(const ExperimentConfig& config);

}  // namespace opplab::cli
