#include "opplab/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "opplab/errors.hpp"
#include "opplab/lattice_reduction.hpp"
#include "opplab/parallel.hpp"

namespace opplab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<double, 6> entries_of(const TernaryForm& f) {
  return {f.m11, f.m22, f.m33, f.m12, f.m13, f.m23};
}

IntegralForm canonical_sign(IntegralForm f) {
  for (std::int64_t e : f.entries) {
    if (e == 0) continue;
    if (e < 0) {
      for (auto& x : f.entries) x = -x;
    }
    break;
  }
  return f;
}

struct Incumbent {
  IntegralForm form;
  double dist = kInf;

  bool offer(const IntegralForm& candidate, double d) {
    if (d < dist || (d == dist && candidate < form)) {
      form = candidate;
      dist = d;
      return true;
    }
    return false;
  }
};

// Depth-first search over the six entries in lexicographic order. Fixing an
// entry q′ᵢ ≠ 0 confines λ to [(qᵢ − d)/q′ᵢ, (qᵢ + d)/q′ᵢ] for any candidate
// that could beat the incumbent distance d; a branch whose λ-interval
// empties is discarded. Pruning is conservative (slightly widened), so
// candidates tying the incumbent are still visited for the tie-break.
class BranchAndBound {
 public:
  BranchAndBound(const std::array<double, 6>& q, std::int64_t R, Incumbent seed,
                 std::uint64_t budget)
      : q_(q), R_(R), best_(seed), budget_(budget) {}

  void run_from(std::int64_t leading) {
    current_[0] = leading;
    if (leading == 0) {
      descend(1, -kInf, kInf, true);
    } else {
      double lo = -kInf;
      double hi = kInf;
      if (!narrow(0, leading, lo, hi)) return;
      descend(1, lo, hi, false);
    }
  }

  const Incumbent& best() const { return best_; }
  bool exhausted() const { return exhausted_; }

 private:
  double slack() const { return best_.dist * (1.0 + 1e-12) + 1e-15; }

  // Intersects [lo, hi] with the λ-range allowed by entry i = v.
  bool narrow(int i, std::int64_t v, double& lo, double& hi) const {
    const double d = slack();
    if (v == 0) return std::abs(q_[i]) <= d;
    if (!std::isfinite(d)) return true;
    const double a = (q_[i] - d) / static_cast<double>(v);
    const double b = (q_[i] + d) / static_cast<double>(v);
    lo = std::max(lo, std::min(a, b));
    hi = std::min(hi, std::max(a, b));
    return lo <= hi;
  }

  // Integer range for entry i compatible with λ ∈ [lo, hi].
  std::pair<std::int64_t, std::int64_t> entry_range(int i, double lo, double hi) const {
    const double d = slack();
    if (!std::isfinite(d) || !(lo > 0.0 || hi < 0.0)) return {-R_, R_};
    const double c_lo = q_[i] - d;
    const double c_hi = q_[i] + d;
    const double values[4] = {c_lo / lo, c_lo / hi, c_hi / lo, c_hi / hi};
    const double vmin = *std::min_element(values, values + 4);
    const double vmax = *std::max_element(values, values + 4);
    const double pad = 1e-9 * (1.0 + std::max(std::abs(vmin), std::abs(vmax)));
    const double r = static_cast<double>(R_);
    const double from = std::max(-r, std::ceil(vmin - pad));
    const double to = std::min(r, std::floor(vmax + pad));
    return {static_cast<std::int64_t>(from), static_cast<std::int64_t>(to)};
  }

  void descend(int depth, double lo, double hi, bool leading_zero) {
    if (exhausted_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    if (depth == 6) {
      IntegralForm f{current_};
      const std::int64_t det = f.determinant();
      if (det != 0) best_.offer(f, scaled_distance_entries(f, det));
      return;
    }
    auto [from, to] = entry_range(depth, lo, hi);
    if (leading_zero) from = std::max<std::int64_t>(from, 0);
    for (std::int64_t v = from; v <= to; ++v) {
      double nlo = lo;
      double nhi = hi;
      if (!narrow(depth, v, nlo, nhi)) continue;
      current_[depth] = v;
      descend(depth + 1, nlo, nhi, leading_zero && v == 0);
      if (exhausted_) return;
    }
  }

  double scaled_distance_entries(const IntegralForm& f, std::int64_t det) const {
    const double lambda = integral_scale(det);
    double d = 0.0;
    for (int i = 0; i < 6; ++i) {
      d = std::max(d, std::abs(q_[i] - lambda * static_cast<double>(f.entries[i])));
    }
    return d;
  }

  std::array<double, 6> q_;
  std::int64_t R_;
  Incumbent best_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
  std::array<std::int64_t, 6> current_{};
};

// Rounds μ·Q for a sweep of scales; cheap starting bounds for the search.
void offer_rounding_candidates(const std::array<double, 6>& q, std::int64_t R,
                               const TernaryForm& form, Incumbent& best) {
  const double top = *std::max_element(q.begin(), q.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
  const double scale = 1.0 / std::abs(top);
  const std::int64_t steps = std::min<std::int64_t>(R, 4096);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double mu = static_cast<double>(k) * static_cast<double>(R) /
                      static_cast<double>(steps) * scale;
    IntegralForm f;
    bool fits = true;
    for (int i = 0; i < 6; ++i) {
      f.entries[i] = static_cast<std::int64_t>(std::llround(mu * q[i]));
      fits = fits && std::abs(f.entries[i]) <= R;
    }
    if (!fits || f.determinant() == 0) continue;
    f = canonical_sign(f);
    best.offer(f, scaled_distance(form, f));
  }
}

}  // namespace

std::int64_t IntegralForm::determinant() const {
  const auto [m11, m22, m33, m12, m13, m23] = entries;
  return m11 * (m22 * m33 - m23 * m23) - m12 * (m12 * m33 - m23 * m13) +
         m13 * (m12 * m23 - m22 * m13);
}

std::int64_t IntegralForm::sup_norm() const {
  std::int64_t m = 0;
  for (std::int64_t e : entries) m = std::max(m, e < 0 ? -e : e);
  return m;
}

TernaryForm IntegralForm::to_real() const {
  return {static_cast<double>(entries[0]), static_cast<double>(entries[1]),
          static_cast<double>(entries[2]), static_cast<double>(entries[3]),
          static_cast<double>(entries[4]), static_cast<double>(entries[5])};
}

double integral_scale(std::int64_t det) { return 1.0 / std::cbrt(static_cast<double>(det)); }

double scaled_distance(const TernaryForm& q, const IntegralForm& q_prime) {
  const std::int64_t det = q_prime.determinant();
  if (det == 0) return kInf;
  const double lambda = integral_scale(det);
  const auto qe = entries_of(q);
  double d = 0.0;
  for (int i = 0; i < 6; ++i) {
    d = std::max(d, std::abs(qe[i] - lambda * static_cast<double>(q_prime.entries[i])));
  }
  return d;
}

std::vector<IntegralForm> lattice_candidates(const TernaryForm& form, double R) {
  const auto q = entries_of(form);
  const auto lead = static_cast<int>(
      std::max_element(q.begin(), q.end(),
                       [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      q.begin());
  if (q[lead] == 0.0) return {};
  const auto bound = static_cast<std::int64_t>(std::floor(R));
  int others[5];
  for (int i = 0, k = 0; i < 6; ++i) {
    if (i != lead) others[k++] = i;
  }

  std::vector<IntegralForm> out;
  auto emit = [&](const Eigen::VectorXd& coeffs) {
    IntegralForm f;
    const double sign = q[lead] > 0 ? 1.0 : -1.0;
    f.entries[lead] = std::llround(sign * coeffs(0));
    for (int k = 0; k < 5; ++k) f.entries[others[k]] = std::llround(sign * coeffs(k + 1));
    if (f.sup_norm() > bound || f.determinant() == 0) return;
    out.push_back(canonical_sign(f));
  };

  // Rows: (ε, α₁..α₅) and −e_i; an integer combination (d, p₁..p₅) has
  // coordinates (dε, dα₁ − p₁, ...), small exactly when p ≈ d·α.
  for (double D = 1.0; D <= 4.0 * R; D *= 2.0) {
    const double eps = std::pow(D, -1.2);
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(6, 6);
    basis(0, 0) = eps;
    for (int k = 0; k < 5; ++k) {
      basis(0, k + 1) = q[others[k]] / q[lead];
      basis(k + 1, k + 1) = -1.0;
    }
    Eigen::MatrixXd u;
    try {
      u = lll_reduce_rows(basis);
    } catch (const CapacityExceeded&) {
      continue;
    }
    for (int r = 0; r < 6; ++r) {
      emit(u.row(r).transpose());
      for (int s = r + 1; s < std::min(6, r + 3); ++s) {
        emit((u.row(r) + u.row(s)).transpose());
        emit((u.row(r) - u.row(s)).transpose());
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ApproxResult best_rational_approx(const NormalizedForm& normalized, double R,
                                  const ApproxOptions& options) {
  if (!(R >= 1.0) || !std::isfinite(R)) throw_invalid("best_rational_approx: requires R >= 1");
  if (R > 1e5) throw_invalid("best_rational_approx: R beyond 1e5 overflows 64-bit determinants");
  const TernaryForm& form = normalized.form();
  const auto q = entries_of(form);
  const auto bound = static_cast<std::int64_t>(std::floor(R));

  Incumbent seed;
  offer_rounding_candidates(q, bound, form, seed);
  for (const IntegralForm& f : lattice_candidates(form, R)) seed.offer(f, scaled_distance(form, f));
  if (options.hint && options.hint->sup_norm() <= bound && options.hint->determinant() != 0) {
    const IntegralForm hint = canonical_sign(*options.hint);
    seed.offer(hint, scaled_distance(form, hint));
  }
  // diag(1,-1,-1) always fits, so the search below cannot come back empty.
  seed.offer(IntegralForm::diagonal(1, -1, -1),
             scaled_distance(form, IntegralForm::diagonal(1, -1, -1)));

  const bool unlimited = R <= options.exhaustive_limit;
  const auto tasks = static_cast<std::size_t>(bound + 1);
  const std::uint64_t per_task =
      unlimited ? std::numeric_limits<std::uint64_t>::max()
                : std::max<std::uint64_t>(1, options.node_budget / tasks);

  // Leading entry m11 ≥ 0 by the sign convention; one task per value.
  std::vector<Incumbent> results(tasks, seed);
  std::vector<char> exhausted(tasks, 0);
  parallel_for(tasks, [&](std::size_t t) {
    BranchAndBound search(q, bound, seed, per_task);
    search.run_from(static_cast<std::int64_t>(t));
    results[t] = search.best();
    exhausted[t] = search.exhausted() ? 1 : 0;
  });

  Incumbent best = seed;
  for (const Incumbent& r : results) best.offer(r.form, r.dist);
  if (!std::isfinite(best.dist)) throw NoCandidate("best_rational_approx: no nondegenerate form");

  ApproxResult result;
  result.q_prime = best.form;
  result.lambda = integral_scale(best.form.determinant());
  result.dist = best.dist;
  result.R = R;
  result.certified = std::none_of(exhausted.begin(), exhausted.end(), [](char e) { return e; });
  return result;
}

DichotomyOutcome dichotomy_report(const NormalizedForm& form, double R, double T,
                                  const DichotomyOptions& options) {
  if (!(R >= 1.0)) throw_invalid("dichotomy_report: requires R >= 1");
  if (!(T > 1.0)) throw_invalid("dichotomy_report: requires T > 1");
  if (T < std::pow(R, options.a_exp)) {
    throw_invalid("dichotomy_report: requires T >= R^a_exp");
  }
  if (!(options.grid_step > 0.0)) throw_invalid("dichotomy_report: requires grid_step > 0");

  DichotomyOutcome outcome;
  DichotomyThresholds& th = outcome.thresholds;
  th.R = R;
  th.T = T;
  th.a_exp = options.a_exp;
  th.k_exp = options.k_exp;
  th.grid_step = options.grid_step;
  th.dist_threshold = std::pow(R, options.a_exp) * std::pow(std::log(T), options.a_exp) / T;
  th.s_bound = std::pow(R, options.k_exp);
  th.eps = options.eps.value_or(std::pow(R, -options.k_exp));

  const ApproxResult approx = best_rational_approx(form, R, options.approx);
  if (approx.dist <= th.dist_threshold) {
    outcome.branch = approx;
    return outcome;
  }

  SmallValuesOutcome small;
  small.approx_dist = approx.dist;
  // A grid step wider than the whole range leaves the single target s = 0.
  const double s_lo = th.s_bound < th.grid_step ? 0.0 : -th.s_bound;
  const double s_hi = th.s_bound < th.grid_step ? 0.0 : th.s_bound;
  small.table = witness_table(form.form(), s_lo, s_hi, th.grid_step, th.eps, T, options.limits);
  small.targets = small.table.rows.size();
  for (const WitnessRow& row : small.table.rows) {
    if (!row.witness) continue;
    ++small.witnessed;
    small.max_witness_norm = std::max(small.max_witness_norm, row.witness->norm);
  }
  small.witnessed_fraction =
      static_cast<double>(small.witnessed) / static_cast<double>(small.targets);
  outcome.branch = std::move(small);
  return outcome;
}

GapTable algebraicity_gap(const NormalizedForm& form, std::span<const double> R_list,
                          const ApproxOptions& options) {
  if (!std::is_sorted(R_list.begin(), R_list.end())) {
    throw_invalid("algebraicity_gap: R_list must be ascending");
  }
  GapTable table;
  ApproxOptions opts = options;
  for (double R : R_list) {
    ApproxResult r = best_rational_approx(form, R, opts);
    opts.hint = r.q_prime;
    table.rows.push_back({R, r});
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const GapRow& row : table.rows) {
    if (!(row.approx.dist > 0.0)) continue;
    const double x = std::log(row.R);
    const double y = std::log(row.approx.dist);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double denom = n * sxx - sx * sx;
  if (n >= 2 && denom > 0.0) {
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    table.fit = GapFit{std::exp(intercept), -slope};
  }
  return table;
}

}  // namespace opplab
