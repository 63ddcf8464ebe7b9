#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "opplab/errors.hpp"
#include "opplab/serialize.hpp"

namespace opplab::cli {
namespace {

using nlohmann::json;

ExperimentConfig defaults_for(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  if (command == "dichotomy") {
    c.R = {10.0};
    c.T = {1e4};
    c.format = "json";
  } else if (command == "witness") {
    c.T = {1e4};
    c.eps = 0.02;
    c.s_min = -5.0;
    c.s_max = 5.0;
  } else if (command == "count") {
    c.T = {500.0, 1000.0, 2000.0};
    c.samples = 1'000'000;
  } else if (command == "cq") {
    c.samples = 1'000'000;
  } else if (command == "rational") {
    c.R = {1, 2, 3, 4, 6, 8, 12};
  } else if (command == "equidist") {
    c.T = {20.0, 400.0};
    c.samples = 400;
  } else if (command == "projection") {
    c.points = 2000;
    c.eps = 1e-4;
  } else if (command == "margulis") {
    c.points = 500;
    c.samples = 16;
    c.alpha = 1.5;
    c.scale = 0.1;
  }
  return c;
}

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) throw_invalid("config key \"" + key + "\" must be a number");
  return j.get<double>();
}

std::uint64_t get_count(const json& j, const std::string& key) {
  const double x = get_real(j, key);
  if (!(x >= 0.0) || x != std::floor(x) || x > 1e15) {
    throw_invalid("config key \"" + key + "\" must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(x);
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.is_string()) throw_invalid("config key \"" + key + "\" must be a string");
  return j.get<std::string>();
}

std::vector<double> get_list(const json& j, const std::string& key) {
  std::vector<double> out;
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw_invalid("config key \"" + key + "\" must be a list");
  for (const json& x : j) out.push_back(get_real(x, key));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"command", [](ExperimentConfig&, const json&) {}},
      {"form", [](ExperimentConfig& c, const json& j) { c.form = j.get<TernaryForm>(); }},
      {"R", [](ExperimentConfig& c, const json& j) { c.R = get_list(j, "R"); }},
      {"T", [](ExperimentConfig& c, const json& j) { c.T = get_list(j, "T"); }},
      {"eps", [](ExperimentConfig& c, const json& j) { c.eps = get_real(j, "eps"); }},
      {"a_exp", [](ExperimentConfig& c, const json& j) { c.a_exp = get_real(j, "a_exp"); }},
      {"k_exp", [](ExperimentConfig& c, const json& j) { c.k_exp = get_real(j, "k_exp"); }},
      {"grid", [](ExperimentConfig& c, const json& j) { c.grid = get_real(j, "grid"); }},
      {"s_min", [](ExperimentConfig& c, const json& j) { c.s_min = get_real(j, "s_min"); }},
      {"s_max", [](ExperimentConfig& c, const json& j) { c.s_max = get_real(j, "s_max"); }},
      {"a", [](ExperimentConfig& c, const json& j) { c.a = get_real(j, "a"); }},
      {"b", [](ExperimentConfig& c, const json& j) { c.b = get_real(j, "b"); }},
      {"coverage_floor",
       [](ExperimentConfig& c, const json& j) { c.coverage_floor = get_real(j, "coverage_floor"); }},
      {"samples", [](ExperimentConfig& c, const json& j) { c.samples = get_count(j, "samples"); }},
      {"seed", [](ExperimentConfig& c, const json& j) { c.seed = get_count(j, "seed"); }},
      {"delta", [](ExperimentConfig& c, const json& j) { c.delta = get_real(j, "delta"); }},
      {"f_radius", [](ExperimentConfig& c, const json& j) { c.f_radius = get_real(j, "f_radius"); }},
      {"points", [](ExperimentConfig& c, const json& j) { c.points = get_count(j, "points"); }},
      {"theta", [](ExperimentConfig& c, const json& j) { c.theta = get_string(j, "theta"); }},
      {"r_grid", [](ExperimentConfig& c, const json& j) { c.r_grid = get_count(j, "r_grid"); }},
      {"alpha", [](ExperimentConfig& c, const json& j) { c.alpha = get_real(j, "alpha"); }},
      {"b1", [](ExperimentConfig& c, const json& j) { c.b1 = get_real(j, "b1"); }},
      {"scale", [](ExperimentConfig& c, const json& j) { c.scale = get_real(j, "scale"); }},
      {"C", [](ExperimentConfig& c, const json& j) { c.C = get_real(j, "C"); }},
      {"c", [](ExperimentConfig& c, const json& j) { c.c = get_real(j, "c"); }},
      {"exceptional_mass",
       [](ExperimentConfig& c, const json& j) { c.exceptional_mass = get_real(j, "exceptional_mass"); }},
      {"ell", [](ExperimentConfig& c, const json& j) { c.ell = get_real(j, "ell"); }},
      {"M", [](ExperimentConfig& c, const json& j) { c.M = get_count(j, "M"); }},
      {"radius", [](ExperimentConfig& c, const json& j) { c.radius = get_real(j, "radius"); }},
      {"out", [](ExperimentConfig& c, const json& j) { c.out = get_string(j, "out"); }},
      {"format", [](ExperimentConfig& c, const json& j) { c.format = get_string(j, "format"); }},
  };
  return table;
}

bool needs_form(const std::string& command) {
  return command != "projection" && command != "margulis";
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw_invalid("config must be a JSON object");
  if (!j.contains("command")) throw_invalid("config is missing \"command\"");
  const std::string command = get_string(j.at("command"), "command");
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
    throw_invalid("unknown command \"" + command + "\"");
  }
  ExperimentConfig config = defaults_for(command);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto setter = setters().find(it.key());
    if (setter == setters().end()) throw_invalid("unknown config key \"" + it.key() + "\"");
    setter->second(config, it.value());
  }
  validate(config);
  return config;
}

json to_json(const ExperimentConfig& c) {
  json j{{"command", c.command},
         {"R", c.R},
         {"T", c.T},
         {"a_exp", c.a_exp},
         {"k_exp", c.k_exp},
         {"grid", c.grid},
         {"s_min", c.s_min},
         {"s_max", c.s_max},
         {"a", c.a},
         {"b", c.b},
         {"coverage_floor", c.coverage_floor},
         {"samples", c.samples},
         {"seed", c.seed},
         {"delta", c.delta},
         {"f_radius", c.f_radius},
         {"points", c.points},
         {"r_grid", c.r_grid},
         {"alpha", c.alpha},
         {"b1", c.b1},
         {"scale", c.scale},
         {"C", c.C},
         {"c", c.c},
         {"exceptional_mass", c.exceptional_mass},
         {"ell", c.ell},
         {"M", c.M},
         {"radius", c.radius},
         {"format", c.format}};
  if (c.form) j["form"] = *c.form;
  if (c.eps) j["eps"] = *c.eps;
  if (c.theta) j["theta"] = *c.theta;
  if (c.out) j["out"] = *c.out;
  return j;
}

std::string canonical_json(const ExperimentConfig& config) {
  return to_json(config).dump(2) + "\n";
}

void validate(const ExperimentConfig& c) {
  if (c.format != "csv" && c.format != "json") throw_invalid("format must be csv or json");
  if (needs_form(c.command) && !c.form) throw_invalid(c.command + ": a form is required");
  if (c.eps && !(*c.eps > 0.0)) throw_invalid("eps must be positive");
  for (double t : c.T) {
    if (!(t >= 1.0) || !std::isfinite(t)) throw_invalid("T values must be finite and >= 1");
  }
  for (double r : c.R) {
    if (!(r >= 1.0) || !std::isfinite(r)) throw_invalid("R values must be finite and >= 1");
  }
  const std::string& cmd = c.command;
  if ((cmd == "dichotomy" || cmd == "witness") && c.T.size() != 1) {
    throw_invalid(cmd + ": takes a single T");
  }
  if (cmd == "dichotomy" && c.R.size() != 1) throw_invalid("dichotomy: takes a single R");
  if (cmd == "rational" && !std::is_sorted(c.R.begin(), c.R.end())) {
    throw_invalid("rational: R list must be ascending");
  }
  if ((cmd == "rational" || cmd == "dichotomy") && c.R.empty()) throw_invalid(cmd + ": needs R");
  if ((cmd == "count" || cmd == "equidist") && c.T.empty()) throw_invalid(cmd + ": needs T");
  if (cmd == "witness" && !(c.grid > 0.0 && c.s_min <= c.s_max)) {
    throw_invalid("witness: requires grid > 0 and s_min <= s_max");
  }
  if (cmd == "count" && !(c.a <= c.b)) throw_invalid("count: requires a <= b");
  if ((cmd == "count" || cmd == "cq") && c.samples < 10'000) {
    throw_invalid(cmd + ": requires at least 10000 Monte Carlo samples");
  }
  if ((cmd == "count" || cmd == "cq") && !(c.delta > 0.0 && c.delta <= 0.1)) {
    throw_invalid(cmd + ": delta must lie in (0, 0.1]");
  }
  if (cmd == "equidist") {
    if (c.samples < 10) throw_invalid("equidist: requires N >= 10 samples");
    if (!(c.f_radius > 0.0)) throw_invalid("equidist: f_radius must be positive");
    for (double t : c.T) {
      if (!(t > 1.0)) throw_invalid("equidist: T values must exceed 1");
    }
  }
  if (cmd == "projection") {
    if (c.points == 0 && !c.theta) throw_invalid("projection: needs points or theta");
    if (c.r_grid == 0) throw_invalid("projection: r_grid must be positive");
  }
  if (cmd == "margulis") {
    if (c.points == 0 && !c.theta) throw_invalid("margulis: needs points or theta");
    if (c.samples == 0) throw_invalid("margulis: needs at least one r sample");
    if (!(c.radius > 0.0)) throw_invalid("margulis: radius must be positive");
  }
}

}  // namespace opplab::cli
