#pragma once

#include <nlohmann/json.hpp>

#include "opplab/approx.hpp"
#include "opplab/enumerate.hpp"
#include "opplab/flows.hpp"
#include "opplab/forms.hpp"
#include "opplab/projection.hpp"

namespace opplab {

using json = nlohmann::json;

// Forms are objects {"m11", "m22", "m33", "m12", "m13", "m23"}. Parsing also
// accepts a diagonal list [d1, d2, d3], a full list of six entries, and the
// string "sqf". Missing cross entries default to 0.
void to_json(json& j, const TernaryForm& form);
void from_json(const json& j, TernaryForm& form);

void to_json(json& j, const IntegralForm& form);
void from_json(const json& j, IntegralForm& form);

void to_json(json& j, const WitnessRecord& record);
void to_json(json& j, const WitnessRow& row);
void to_json(json& j, const WitnessTable& table);
void to_json(json& j, const CountReport& report);

void to_json(json& j, const ApproxResult& result);
void to_json(json& j, const DichotomyThresholds& thresholds);
// {"branch": "small_values" | "rational_approx", "thresholds": {...}, ...}
void to_json(json& j, const DichotomyOutcome& outcome);
void to_json(json& j, const GapTable& table);

void to_json(json& j, const EquidistReport& report);

// Either {"points": [[w0..w4], ...], "weights": [...]} or a bare list of
// 5-tuples.
void to_json(json& j, const FiniteConfig& config);
void from_json(const json& j, FiniteConfig& config);
void to_json(json& j, const SurveyRow& row);
void to_json(json& j, const ProjectionSurvey& survey);
void to_json(json& j, const ImprovementStats& stats);

// Lattice bases as row-major 9-tuples.
json lattice_to_json(const LatticePoint& x);
LatticePoint lattice_from_json(const json& j);

}  // namespace opplab
