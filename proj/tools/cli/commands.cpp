#include "cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "opplab/approx.hpp"
#include "opplab/enumerate.hpp"
#include "opplab/errors.hpp"
#include "opplab/flows.hpp"
#include "opplab/projection.hpp"
#include "opplab/serialize.hpp"

namespace opplab::cli {
namespace {

struct Report {
  std::string text;
  int status = kExitOk;
};

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    row();
    for (const char* h : header) field(std::string(h));
  }

  Csv& row() {
    if (!first_row_) text_ += '\n';
    first_row_ = false;
    first_field_ = true;
    return *this;
  }
  Csv& field(const std::string& s) {
    if (!first_field_) text_ += ',';
    first_field_ = false;
    text_ += s;
    return *this;
  }
  Csv& field(double x) { return field(fmt::format("{}", x)); }
  Csv& field(std::int64_t x) { return field(fmt::format("{}", x)); }
  Csv& field(std::size_t x) { return field(fmt::format("{}", x)); }
  Csv& field(bool x) { return field(std::string(x ? "1" : "0")); }
  Csv& blank(int n) {
    for (int i = 0; i < n; ++i) field(std::string());
    return *this;
  }
  std::string str() const { return text_ + '\n'; }

 private:
  std::string text_;
  bool first_row_ = true;
  bool first_field_ = true;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

FiniteConfig load_theta(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot open configuration file " + path);
  return json::parse(in).get<FiniteConfig>();
}

Report cmd_dichotomy(const ExperimentConfig& c) {
  const Normalization n = normalize(*c.form);
  DichotomyOptions options;
  options.a_exp = c.a_exp;
  options.k_exp = c.k_exp;
  options.grid_step = c.grid;
  options.eps = c.eps;
  const DichotomyOutcome outcome = dichotomy_report(n.form, c.R[0], c.T[0], options);

  Report report;
  double coverage = 1.0;
  if (!outcome.is_rational()) {
    coverage = std::get<SmallValuesOutcome>(outcome.branch).witnessed_fraction;
    if (coverage < c.coverage_floor) report.status = kExitAnomaly;
  }
  if (c.format == "json") {
    json j = outcome;
    j["form"] = n.form.form();
    j["scale"] = n.scale;
    j["coverage_floor"] = c.coverage_floor;
    j["anomaly"] = report.status == kExitAnomaly;
    report.text = dump(j);
    return report;
  }
  Csv csv{"branch", "dist", "dist_threshold", "targets", "witnessed_fraction", "anomaly"};
  csv.row().field(std::string(outcome.is_rational() ? "rational_approx" : "small_values"));
  if (outcome.is_rational()) {
    csv.field(std::get<ApproxResult>(outcome.branch).dist);
  } else {
    csv.field(std::get<SmallValuesOutcome>(outcome.branch).approx_dist);
  }
  csv.field(outcome.thresholds.dist_threshold);
  if (outcome.is_rational()) {
    csv.blank(2);
  } else {
    const auto& small = std::get<SmallValuesOutcome>(outcome.branch);
    csv.field(small.targets).field(small.witnessed_fraction);
  }
  csv.field(report.status == kExitAnomaly);
  report.text = csv.str();
  return report;
}

Report cmd_witness(const ExperimentConfig& c) {
  const WitnessTable table = witness_table(*c.form, c.s_min, c.s_max, c.grid, *c.eps, c.T[0]);
  if (c.format == "json") return {dump(json(table))};
  Csv csv{"s", "v1", "v2", "v3", "value", "gap", "norm"};
  for (const WitnessRow& row : table.rows) {
    csv.row().field(row.target);
    if (!row.witness) {
      csv.blank(6);
      continue;
    }
    const WitnessRecord& w = *row.witness;
    csv.field(w.v[0]).field(w.v[1]).field(w.v[2]).field(w.value).field(w.gap).field(w.norm);
  }
  return {csv.str()};
}

Report cmd_count(const ExperimentConfig& c) {
  const MainTermOptions options{c.delta, c.samples, c.seed};
  const auto reports = count_vs_main_term(*c.form, c.a, c.b, c.T, options);
  if (c.format == "json") return {dump(json(reports))};
  Csv csv{"a", "b", "T", "count", "C_Q", "C_Q_stderr", "main_term", "ratio", "degenerate"};
  for (const CountReport& r : reports) {
    csv.row().field(r.a).field(r.b).field(r.T).field(r.count).field(r.c_q).field(r.c_q_stderr);
    csv.field(r.main_term).field(r.ratio).field(r.degenerate_window);
  }
  return {csv.str()};
}

Report cmd_cq(const ExperimentConfig& c) {
  const MainTermEstimate e = main_term_constant(*c.form, c.delta, c.samples, c.seed);
  if (c.format == "json") {
    return {dump(json{{"C_Q", e.value},
                      {"C_Q_stderr", e.std_error},
                      {"delta", c.delta},
                      {"samples", c.samples},
                      {"seed", c.seed}})};
  }
  Csv csv{"C_Q", "C_Q_stderr", "delta", "samples", "seed"};
  csv.row().field(e.value).field(e.std_error).field(c.delta);
  csv.field(fmt::format("{}", c.samples)).field(fmt::format("{}", c.seed));
  return {csv.str()};
}

Report cmd_rational(const ExperimentConfig& c) {
  const GapTable table = algebraicity_gap(normalize(*c.form).form, c.R);
  if (c.format == "json") return {dump(json(table))};
  Csv csv{"R", "dist", "lambda", "certified", "q11", "q22", "q33", "q12", "q13", "q23"};
  for (const GapRow& row : table.rows) {
    csv.row().field(row.R).field(row.approx.dist).field(row.approx.lambda);
    csv.field(row.approx.certified);
    for (std::int64_t e : row.approx.q_prime.entries) csv.field(e);
  }
  return {csv.str()};
}

Report cmd_equidist(const ExperimentConfig& c) {
  const auto reports = discrepancy_scan(*c.form, c.T, c.samples, c.f_radius, c.seed);
  if (c.format == "json") return {dump(json(reports))};
  Csv csv{"T", "N", "empirical", "haar", "deviation", "min_inj"};
  for (const EquidistReport& r : reports) {
    csv.row().field(r.T).field(r.samples).field(r.empirical).field(r.haar).field(r.deviation);
    csv.field(r.min_injectivity);
  }
  return {csv.str()};
}

void survey_rows(Csv& csv, const std::vector<SurveyRow>& rows) {
  for (const SurveyRow& r : rows) {
    csv.row().field(r.r).field(r.exceptional_fraction).field(r.max_count);
    csv.field(r.energy_median).field(r.energy_p95);
  }
}

Report cmd_projection(const ExperimentConfig& c) {
  const FiniteConfig theta =
      c.theta ? load_theta(*c.theta) : uniform_ball_config(c.points, 1.0, c.seed);
  ProjectionParams params;
  params.alpha = c.alpha;
  params.b1 = c.b1;
  params.b = c.scale;
  params.eps = *c.eps;
  params.C = c.C;
  params.c = c.c;
  params.exceptional_mass = c.exceptional_mass;
  const ProjectionSurvey survey = projection_survey(theta, params, unit_grid(c.r_grid));
  if (c.format == "json") return {dump(json(survey))};
  Csv csv{"r", "exceptional_fraction", "max_count", "energy_median", "energy_p95"};
  survey_rows(csv, survey.rows);
  return {csv.str()};
}

Report cmd_margulis(const ExperimentConfig& c) {
  const FiniteConfig f =
      c.theta ? load_theta(*c.theta) : uniform_ball_config(c.points, c.radius, c.seed);
  const ImprovementStats stats =
      improvement_step_sim(f, c.alpha, c.ell, c.scale, c.samples, c.M, c.seed);
  if (c.format == "json") return {dump(json(stats))};
  Csv csv{"r", "exceptional_fraction", "max_count", "energy_median", "energy_p95"};
  survey_rows(csv, stats.rows);
  return {csv.str()};
}

Report dispatch(const ExperimentConfig& c) {
  if (c.command == "dichotomy") return cmd_dichotomy(c);
  if (c.command == "witness") return cmd_witness(c);
  if (c.command == "count") return cmd_count(c);
  if (c.command == "cq") return cmd_cq(c);
  if (c.command == "rational") return cmd_rational(c);
  if (c.command == "equidist") return cmd_equidist(c);
  if (c.command == "projection") return cmd_projection(c);
  return cmd_margulis(c);
}

enum class Kind { Real, List, Count, Text, Form };

struct Flag {
  const char* name;
  const char* key;
  Kind kind;
  const char* help;
};

constexpr Flag kFlags[] = {
    {"--form", "form", Kind::Form, "Form as JSON object, diagonal list [d1,d2,d3], or sqf"},
    {"--R", "R", Kind::List, "Height bound(s), comma separated"},
    {"--T", "T", Kind::List, "Radius / time parameter(s), comma separated"},
    {"--eps", "eps", Kind::Real, "Tolerance"},
    {"--grid", "grid", Kind::Real, "Target grid step"},
    {"--samples", "samples", Kind::Count, "Sample count (Monte Carlo, N, or r samples)"},
    {"--seed", "seed", Kind::Count, "Random seed"},
    {"--out", "out", Kind::Text, "Output file (default stdout)"},
    {"--format", "format", Kind::Text, "csv or json"},
    {"--a", "a", Kind::Real, "Window lower end"},
    {"--b", "b", Kind::Real, "Window upper end"},
    {"--a-exp", "a_exp", Kind::Real, "Distance threshold exponent"},
    {"--k-exp", "k_exp", Kind::Real, "Target range exponent"},
    {"--s-min", "s_min", Kind::Real, "Smallest witness target"},
    {"--s-max", "s_max", Kind::Real, "Largest witness target"},
    {"--coverage-floor", "coverage_floor", Kind::Real, "Witness coverage below this exits 2"},
    {"--delta", "delta", Kind::Real, "Coarea slab half-width"},
    {"--f-radius", "f_radius", Kind::Real, "Bump radius of the Siegel test function"},
    {"--points", "points", Kind::Count, "Size of the random configuration"},
    {"--theta", "theta", Kind::Text, "Configuration JSON file (overrides --points)"},
    {"--r-grid", "r_grid", Kind::Count, "Number of r grid points"},
    {"--alpha", "alpha", Kind::Real, "Energy exponent"},
    {"--b1", "b1", Kind::Real, "Smallest non-concentration scale"},
    {"--scale", "scale", Kind::Real, "Scale b of the survey / Margulis function"},
    {"--C", "C", Kind::Real, "Survey constant C"},
    {"--c", "c", Kind::Real, "Survey exponent constant c"},
    {"--exceptional-mass", "exceptional_mass", Kind::Real, "Violating mass that flags r"},
    {"--ell", "ell", Kind::Real, "Flow time of the improvement step"},
    {"--M", "M", Kind::Count, "Margulis truncation"},
    {"--radius", "radius", Kind::Real, "Radius of the random configuration"},
};

double parse_real(const std::string& text, const std::string& flag) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw_invalid(flag + ": not a number: " + text);
  return x;
}

json flag_value(const Flag& flag, const std::string& text) {
  switch (flag.kind) {
    case Kind::Real:
    case Kind::Count:
      return parse_real(text, flag.name);
    case Kind::List: {
      json list = json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) list.push_back(parse_real(item, flag.name));
      return list;
    }
    case Kind::Text:
      return text;
    case Kind::Form: {
      json j = json::parse(text, nullptr, false);
      return j.is_discarded() ? json(text) : j;
    }
  }
  return nullptr;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Report report = dispatch(config);
    if (config.out) {
      std::ofstream file(*config.out, std::ios::binary);
      if (!file) {
        err << "error: cannot open output file " << *config.out << "\n";
        return kExitUsage;
      }
      file << report.text;
      if (!file) {
        err << "error: failed writing " << *config.out << "\n";
        return kExitUsage;
      }
    } else {
      out << report.text;
    }
    if (report.status == kExitAnomaly) {
      err << "warning: witness coverage below the configured floor\n";
    }
    return report.status;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Experiments on indefinite ternary forms, lattices and restricted projections",
               "opplab"};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, bool> dump_config;
  const std::map<std::string, std::string> descriptions = {
      {"dichotomy", "Witness table or rational approximation for a normalized form"},
      {"witness", "Small-value witnesses over a grid of targets"},
      {"count", "Value counts against the main term C_Q (b - a) T"},
      {"cq", "Monte Carlo estimate of C_Q"},
      {"rational", "Best rational approximation distance per height bound"},
      {"equidist", "Siegel-average discrepancy along a_{log T} u_r x0"},
      {"projection", "Restricted-projection concentration survey"},
      {"margulis", "Margulis-function improvement-step simulation"},
  };
  for (const std::string& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    for (const Flag& flag : kFlags) sub->add_option(flag.name, values[name][flag.key], flag.help);
    sub->add_option("--config", config_paths[name], "Experiment config JSON file");
    sub->add_flag("--dump-config", dump_config[name], "Print the canonical config and exit");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  ExperimentConfig config;
  try {
    json j = json::object();
    if (!config_paths[command].empty()) {
      std::ifstream in(config_paths[command]);
      if (!in) throw_invalid("cannot open config file " + config_paths[command]);
      j = json::parse(in);
      if (!j.is_object()) throw_invalid("config file must hold a JSON object");
      if (j.contains("command") && j.at("command") != command) {
        throw_invalid("config file is for command " + j.at("command").dump());
      }
    }
    j["command"] = command;
    for (const Flag& flag : kFlags) {
      if (sub->get_option(flag.name)->count() > 0) {
        j[flag.key] = flag_value(flag, values[command][flag.key]);
      }
    }
    config = parse_config(j);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (dump_config[command]) {
    out << canonical_json(config);
    return kExitOk;
  }
  return run_experiment(config, out, err);
}

}  // namespace opplab::cli
