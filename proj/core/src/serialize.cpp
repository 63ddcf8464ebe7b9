#include "opplab/serialize.hpp"

#include <cmath>
#include <string>

#include "opplab/errors.hpp"

namespace opplab {
namespace {

constexpr const char* kFormKeys[6] = {"m11", "m22", "m33", "m12", "m13", "m23"};

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double real(const json& j, const char* what) {
  if (!j.is_number()) throw_invalid(std::string("expected a number for ") + what);
  return j.get<double>();
}

}  // namespace

void to_json(json& j, const TernaryForm& form) {
  j = json{{"m11", form.m11}, {"m22", form.m22}, {"m33", form.m33},
           {"m12", form.m12}, {"m13", form.m13}, {"m23", form.m23}};
}

void from_json(const json& j, TernaryForm& form) {
  double* fields[6] = {&form.m11, &form.m22, &form.m33, &form.m12, &form.m13, &form.m23};
  form = TernaryForm{};
  if (j.is_string()) {
    if (j.get<std::string>() != "sqf") throw_invalid("unknown named form: " + j.get<std::string>());
    form = standard_form();
    return;
  }
  if (j.is_array()) {
    if (j.size() != 3 && j.size() != 6) throw_invalid("form list must have 3 or 6 entries");
    for (std::size_t i = 0; i < j.size(); ++i) *fields[i] = real(j[i], "form entry");
    return;
  }
  if (!j.is_object()) throw_invalid("form must be an object, a list, or \"sqf\"");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : kFormKeys) known = known || it.key() == key;
    if (!known) throw_invalid("unknown form key: " + it.key());
  }
  for (int i = 0; i < 6; ++i) {
    const bool required = i < 3;
    if (j.contains(kFormKeys[i])) {
      *fields[i] = real(j.at(kFormKeys[i]), kFormKeys[i]);
    } else if (required) {
      throw_invalid(std::string("form is missing ") + kFormKeys[i]);
    }
  }
}

void to_json(json& j, const IntegralForm& form) { j = form.entries; }

void from_json(const json& j, IntegralForm& form) {
  if (!j.is_array() || j.size() != 6) throw_invalid("integral form must be a list of 6 integers");
  for (std::size_t i = 0; i < 6; ++i) {
    if (!j[i].is_number_integer()) throw_invalid("integral form entries must be integers");
    form.entries[i] = j[i].get<std::int64_t>();
  }
}

void to_json(json& j, const WitnessRecord& record) {
  j = json{{"s", record.target}, {"v", record.v},       {"value", record.value},
           {"gap", record.gap},  {"norm", record.norm}};
}

void to_json(json& j, const WitnessRow& row) {
  j = json{{"s", row.target}};
  j["witness"] = row.witness ? json(*row.witness) : json(nullptr);
}

void to_json(json& j, const WitnessTable& table) {
  j = json{{"rows", table.rows}, {"missing_fraction", table.missing_fraction}};
}

void to_json(json& j, const CountReport& report) {
  j = json{{"a", report.a},
           {"b", report.b},
           {"T", report.T},
           {"count", report.count},
           {"C_Q", report.c_q},
           {"C_Q_stderr", report.c_q_stderr},
           {"main_term", report.main_term},
           {"ratio", number(report.ratio)},
           {"degenerate", report.degenerate_window}};
}

void to_json(json& j, const ApproxResult& result) {
  j = json{{"q_prime", result.q_prime}, {"det", result.q_prime.determinant()},
           {"lambda", result.lambda},   {"dist", result.dist},
           {"R", result.R},             {"certified", result.certified}};
}

void to_json(json& j, const DichotomyThresholds& t) {
  j = json{{"R", t.R},
           {"T", t.T},
           {"a_exp", t.a_exp},
           {"k_exp", t.k_exp},
           {"grid_step", t.grid_step},
           {"dist_threshold", t.dist_threshold},
           {"s_bound", t.s_bound},
           {"eps", t.eps}};
}

void to_json(json& j, const DichotomyOutcome& outcome) {
  j = json{{"thresholds", outcome.thresholds}};
  if (const auto* approx = std::get_if<ApproxResult>(&outcome.branch)) {
    j["branch"] = "rational_approx";
    j["rational_approx"] = *approx;
  } else {
    const auto& small = std::get<SmallValuesOutcome>(outcome.branch);
    j["branch"] = "small_values";
    j["small_values"] = json{{"targets", small.targets},
                             {"witnessed", small.witnessed},
                             {"witnessed_fraction", small.witnessed_fraction},
                             {"max_witness_norm", small.max_witness_norm},
                             {"approx_dist", small.approx_dist},
                             {"table", small.table}};
  }
}

void to_json(json& j, const GapTable& table) {
  j = json{{"rows", json::array()}};
  for (const GapRow& row : table.rows) j["rows"].push_back(json{{"R", row.R}, {"approx", row.approx}});
  j["fit"] = table.fit ? json{{"c", table.fit->c}, {"E", table.fit->E}} : json(nullptr);
}

void to_json(json& j, const EquidistReport& report) {
  j = json{{"T", report.T},
           {"N", report.samples},
           {"empirical", report.empirical},
           {"haar", report.haar},
           {"deviation", report.deviation},
           {"min_inj", report.min_injectivity}};
}

void to_json(json& j, const FiniteConfig& config) {
  j = json{{"points", config.points}};
  if (!config.weights.empty()) j["weights"] = config.weights;
}

void from_json(const json& j, FiniteConfig& config) {
  config = FiniteConfig{};
  const json* points = &j;
  if (j.is_object()) {
    if (!j.contains("points")) throw_invalid("configuration object needs \"points\"");
    points = &j.at("points");
    if (j.contains("weights")) {
      for (const json& w : j.at("weights")) config.weights.push_back(real(w, "weight"));
    }
  }
  if (!points->is_array()) throw_invalid("configuration points must be a list");
  for (const json& p : *points) {
    if (!p.is_array() || p.size() != 5) throw_invalid("configuration points must be 5-tuples");
    RepVector w;
    for (std::size_t i = 0; i < 5; ++i) w[i] = real(p[i], "point coordinate");
    config.points.push_back(w);
  }
}

void to_json(json& j, const SurveyRow& row) {
  j = json{{"r", row.r},
           {"exceptional_fraction", row.exceptional_fraction},
           {"max_count", row.max_count},
           {"energy_median", row.energy_median},
           {"energy_p95", row.energy_p95},
           {"exceptional", row.exceptional}};
}

void to_json(json& j, const ProjectionSurvey& survey) {
  j = json{{"egbd", survey.egbd},
           {"count_bound", survey.count_bound},
           {"exceptional_r_fraction", survey.exceptional_r_fraction},
           {"rows", survey.rows}};
}

void to_json(json& j, const ImprovementStats& stats) {
  j = json{{"median_ratio", stats.median_ratio},
           {"p95_ratio", stats.p95_ratio},
           {"mean_old_energy", stats.mean_old_energy},
           {"mean_new_energy", stats.mean_new_energy},
           {"rows", stats.rows}};
}

json lattice_to_json(const LatticePoint& x) {
  json j = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) j.push_back(x.basis()(i, k));
  }
  return j;
}

LatticePoint lattice_from_json(const json& j) {
  if (!j.is_array() || j.size() != 9) throw_invalid("lattice basis must be a row-major 9-tuple");
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) m(i, k) = real(j[3 * i + k], "basis entry");
  }
  return LatticePoint(m);
}

}  // namespace opplab
