#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "opplab/enumerate.hpp"
#include "opplab/forms.hpp"

namespace opplab {

// Quadratic form with integer Gram entries, ordered (m11, m22, m33, m12,
// m13, m23) like TernaryForm. Integer-valued forms with half-integral cross
// terms are representable after doubling.
struct IntegralForm {
  std::array<std::int64_t, 6> entries{};

  static IntegralForm diagonal(std::int64_t d1, std::int64_t d2, std::int64_t d3) {
    return {{d1, d2, d3, 0, 0, 0}};
  }

  std::int64_t determinant() const;
  std::int64_t sup_norm() const;
  TernaryForm to_real() const;

  friend auto operator<=>(const IntegralForm&, const IntegralForm&) = default;
};

// Signed real cube root: λ = sign(det)·|det|^{-1/3}.
double integral_scale(std::int64_t det);

// sup-norm distance ‖Q − λQ′‖ with λ = integral_scale(det Q′).
double scaled_distance(const TernaryForm& q, const IntegralForm& q_prime);

struct ApproxResult {
  IntegralForm q_prime;
  double lambda = 0.0;
  double dist = 0.0;
  double R = 0.0;
  // True when the search provably found the minimum; false when the node
  // budget ran out and only the heuristic candidates back the result.
  bool certified = true;
};

struct ApproxOptions {
  // Searches up to this height are always run to completion.
  double exhaustive_limit = 12.0;
  // Branch-and-bound node budget beyond the exhaustive limit.
  std::uint64_t node_budget = 200'000'000;
  // Feasible form (sup-norm ≤ R) used as a starting bound.
  std::optional<IntegralForm> hint;
};

// Integral Q′ with sup_norm ≤ R and det ≠ 0 minimizing ‖Q − λQ′‖; ties go
// to the lexicographically smallest representative with first nonzero entry
// positive (Q′ and −Q′ give the same λQ′).
ApproxResult best_rational_approx(const NormalizedForm& form, double R,
                                  const ApproxOptions& options = {});

// Candidate integral forms proportional to Q from LLL-reduced simultaneous
// Diophantine approximation lattices. Heuristic.
std::vector<IntegralForm> lattice_candidates(const TernaryForm& form, double R);

struct DichotomyThresholds {
  double R = 0.0;
  double T = 0.0;
  double a_exp = 4.0;
  double k_exp = 0.125;
  double grid_step = 0.1;
  // R^{a_exp}(log T)^{a_exp}/T
  double dist_threshold = 0.0;
  // Targets cover [-s_bound, s_bound] with s_bound = R^{k_exp}.
  double s_bound = 0.0;
  double eps = 0.0;
};

struct SmallValuesOutcome {
  std::size_t targets = 0;
  std::size_t witnessed = 0;
  double witnessed_fraction = 0.0;
  double max_witness_norm = 0.0;
  // Distance found by the rational search that ruled out the other branch.
  double approx_dist = 0.0;
  WitnessTable table;
};

struct DichotomyOutcome {
  DichotomyThresholds thresholds;
  std::variant<SmallValuesOutcome, ApproxResult> branch;

  bool is_rational() const { return std::holds_alternative<ApproxResult>(branch); }
};

struct DichotomyOptions {
  double a_exp = 4.0;
  double k_exp = 0.125;
  double grid_step = 0.1;
  // Overrides the default tolerance R^{-k_exp} when set.
  std::optional<double> eps;
  ApproxOptions approx;
  EnumerationLimits limits;
};

// Runs the rational search; if the distance is within the threshold the
// outcome is RationalApprox, otherwise the witness table over
// s ∈ [-R^k, R^k] is computed and returned as SmallValues.
DichotomyOutcome dichotomy_report(const NormalizedForm& form, double R, double T,
                                  const DichotomyOptions& options = {});

struct GapRow {
  double R = 0.0;
  ApproxResult approx;
};

struct GapFit {
  // dist ≈ c·R^{-E}, least squares in log-log over rows with dist > 0.
  double c = 0.0;
  double E = 0.0;
};

struct GapTable {
  std::vector<GapRow> rows;
  std::optional<GapFit> fit;
};

GapTable algebraicity_gap(const NormalizedForm& form, std::span<const double> R_list,
                          const ApproxOptions& options = {});

}  // namespace opplab
