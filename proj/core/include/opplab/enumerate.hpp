#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "opplab/forms.hpp"

namespace opplab {

// Ceiling on the number of lattice candidates any single enumeration may
// visit. Enumerations slice the ball instead of materializing it, so a query
// with a huge radius is fine as long as the work it actually does stays
// under the ceiling.
struct EnumerationLimits {
  std::uint64_t max_candidates = 1'000'000'000;
};

struct WitnessRecord {
  double target = 0.0;
  IntVec3 v{};
  double value = 0.0;
  double gap = 0.0;
  double norm = 0.0;
};

struct WitnessRow {
  double target = 0.0;
  std::optional<WitnessRecord> witness;
};

struct WitnessTable {
  std::vector<WitnessRow> rows;
  // Fraction of grid targets without a witness.
  double missing_fraction = 0.0;
};

struct CountReport {
  double a = 0.0;
  double b = 0.0;
  double T = 0.0;
  std::int64_t count = 0;
  double c_q = 0.0;
  double c_q_stderr = 0.0;
  double main_term = 0.0;
  // count / main_term; NaN for a degenerate window (b == a).
  double ratio = 0.0;
  bool degenerate_window = false;
};

struct MainTermEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct MainTermOptions {
  double delta = 0.05;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
};

// ‖v‖² of an integer vector.
std::int64_t norm2(const IntVec3& v);
bool is_primitive(const IntVec3& v);
// First nonzero coordinate positive.
bool is_canonical(const IntVec3& v);
// Enumeration order: ‖v‖² ascending, then v lexicographically descending.
bool enumeration_less(const IntVec3& lhs, const IntVec3& rhs);

// Lazily yields the canonical representatives of primitive vectors with
// 0 < ‖v‖ ≤ T in enumeration order, one norm shell block at a time.
class PrimitiveVectorStream {
 public:
  explicit PrimitiveVectorStream(double T, EnumerationLimits limits = {});

  std::optional<IntVec3> next();
  std::uint64_t visited() const { return visited_; }

 private:
  void refill();

  std::int64_t max_norm2_;
  std::int64_t next_lo_ = 1;
  EnumerationLimits limits_;
  std::uint64_t visited_ = 0;
  std::vector<IntVec3> buffer_;
  std::size_t cursor_ = 0;
};

std::vector<IntVec3> primitive_vectors(double T, EnumerationLimits limits = {});

// Minimal-norm primitive v (canonical sign) with |Q(v) - s| ≤ eps and
// ‖v‖ ≤ T; ties go to the enumeration order.
std::optional<WitnessRecord> find_witness(const TernaryForm& form, double s, double eps,
                                          double T, EnumerationLimits limits = {});

// Targets s_min + i·step for i = 0, 1, ... while ≤ s_max (s_min == s_max
// gives one target).
std::vector<double> target_grid(double s_min, double s_max, double step);

WitnessTable witness_table(const TernaryForm& form, double s_min, double s_max, double step,
                           double eps, double T, EnumerationLimits limits = {});

// #{v ∈ ℤ³ : 0 < ‖v‖ ≤ T, a ≤ Q(v) ≤ b}. Counts non-primitive vectors and
// both v and -v; the origin is excluded.
std::int64_t count_values(const TernaryForm& form, double a, double b, double T,
                          EnumerationLimits limits = {});

// Monte Carlo estimate of C_Q = ∫_{L∩B(0,1)} dσ/‖∇Q‖ via the coarea limit
// vol{v ∈ B(0,1) : |Q(v)| ≤ δ} / (2δ), Richardson-extrapolated over δ and
// δ/2 to cancel the O(δ²) bias.
MainTermEstimate main_term_constant(const TernaryForm& form, double delta,
                                    std::uint64_t samples, std::uint64_t seed);

std::vector<CountReport> count_vs_main_term(const TernaryForm& form, double a, double b,
                                            std::span<const double> T_list,
                                            const MainTermOptions& options = {},
                                            EnumerationLimits limits = {});

}  // namespace opplab
