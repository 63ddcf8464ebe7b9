#include "opplab/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "opplab/errors.hpp"
#include "opplab/parallel.hpp"
#include "opplab/random.hpp"

namespace opplab {
namespace {

std::int64_t isqrt(std::int64_t n) {
  if (n <= 0) return 0;
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Smallest r ≥ 0 with r² ≥ n.
std::int64_t ceil_isqrt(std::int64_t n) {
  if (n <= 0) return 0;
  const std::int64_t r = isqrt(n);
  return r * r == n ? r : r + 1;
}

// Largest integer n² with n² ≤ T².
std::int64_t max_norm2_for(double T) {
  const double t2 = T * T;
  if (t2 >= 9.0e18) throw CapacityExceeded("radius too large for 64-bit norms");
  auto n = static_cast<std::int64_t>(std::floor(t2));
  // floor(T²) can be off by one when T² rounds across an integer.
  while (static_cast<double>(n + 1) <= t2) ++n;
  while (n > 0 && static_cast<double>(n) > t2) --n;
  return n;
}

class WorkBudget {
 public:
  explicit WorkBudget(EnumerationLimits limits) : limit_(limits.max_candidates) {}

  void charge(std::uint64_t amount) {
    const std::uint64_t total = used_.fetch_add(amount) + amount;
    if (total > limit_) {
      throw CapacityExceeded("enumeration exceeded " + std::to_string(limit_) +
                             " candidates");
    }
  }

 private:
  std::uint64_t limit_;
  std::atomic<std::uint64_t> used_{0};
};

// Real roots of a·z² + b·z + c = 0 appended to `out`.
void append_roots(double a, double b, double c, std::vector<double>& out) {
  if (a == 0.0) {
    if (b != 0.0) out.push_back(-c / b);
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  if (q != 0.0) {
    out.push_back(q / a);
    out.push_back(c / q);
  } else {
    out.push_back(0.0);
  }
}

// Slices {v : lo ≤ ‖v‖² ≤ hi, window_lo ≤ Q(v) ≤ window_hi} into columns
// along the coordinate with the largest |m_kk|. For each column the
// admissible z form at most a few intervals, found from the roots of the
// two boundary quadratics; every integer in a slightly widened interval is
// then tested exactly by `accept`, so the floating-point root finding only
// has to produce a superset.
class WindowScanner {
 public:
  WindowScanner(const TernaryForm& form, std::int64_t lo, std::int64_t hi, double window_lo,
                double window_hi)
      : form_(form), lo_(lo), hi_(hi), window_lo_(window_lo), window_hi_(window_hi) {
    const double diag[3] = {std::abs(form.m11), std::abs(form.m22), std::abs(form.m33)};
    axis_ = static_cast<int>(std::max_element(diag, diag + 3) - diag);
    outer_a_ = axis_ == 0 ? 1 : 0;
    outer_b_ = axis_ == 2 ? 1 : 2;
  }

  std::int64_t outer_radius() const { return isqrt(hi_); }

  // Visits every accepted vector whose first outer coordinate equals p.
  template <class Accept, class Visit>
  std::uint64_t scan_row(std::int64_t p, const Accept& accept, const Visit& visit) const {
    std::uint64_t work = 0;
    const std::int64_t q_max = isqrt(hi_ - p * p);
    std::vector<double> points;
    std::vector<double> cuts;
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    for (std::int64_t q = -q_max; q <= q_max; ++q) {
      ++work;
      const std::int64_t r2 = p * p + q * q;
      const std::int64_t z_max = isqrt(hi_ - r2);
      const std::int64_t z_min = r2 >= lo_ ? 0 : ceil_isqrt(lo_ - r2);
      if (z_min > z_max) continue;

      column_ranges(static_cast<double>(p), static_cast<double>(q), z_max, points, cuts, ranges);
      for (const auto& [zlo, zhi] : ranges) {
        for (std::int64_t z = zlo; z <= zhi; ++z) {
          if (z > -z_min && z < z_min) {
            z = z_min - 1;
            continue;
          }
          ++work;
          IntVec3 v{};
          v[axis_] = z;
          v[outer_a_] = p;
          v[outer_b_] = q;
          const double value = evaluate(form_, v);
          if (accept(value)) visit(v, value);
        }
      }
    }
    return work;
  }

 private:
  void column_ranges(double p, double q, std::int64_t z_max, std::vector<double>& points,
                     std::vector<double>& cuts,
                     std::vector<std::pair<std::int64_t, std::int64_t>>& ranges) const {
    const double a = form_.entry(axis_, axis_);
    const double b = 2.0 * (form_.entry(outer_a_, axis_) * p + form_.entry(outer_b_, axis_) * q);
    const double c = form_.entry(outer_a_, outer_a_) * p * p +
                     form_.entry(outer_b_, outer_b_) * q * q +
                     2.0 * form_.entry(outer_a_, outer_b_) * p * q;
    const double bound = static_cast<double>(z_max);

    points.clear();
    append_roots(a, b, c - window_lo_, points);
    append_roots(a, b, c - window_hi_, points);
    if (a != 0.0) points.push_back(-b / (2.0 * a));
    const std::size_t isolated = points.size();
    points.push_back(-bound);
    points.push_back(bound);
    // Critical points double as candidate intervals of zero width: when the
    // window is a single value the solution set is just these roots.
    cuts.assign(points.begin(), points.end());
    std::erase_if(cuts, [&](double x) { return !(x >= -bound && x <= bound); });
    std::sort(cuts.begin(), cuts.end());

    ranges.clear();
    auto add = [&](double x0, double x1) {
      const double m0 = 1e-6 * (1.0 + std::abs(x0));
      const double m1 = 1e-6 * (1.0 + std::abs(x1));
      const double lo = std::max(std::ceil(x0 - m0), -bound);
      const double hi = std::min(std::floor(x1 + m1), bound);
      if (lo <= hi) ranges.emplace_back(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi));
    };
    for (std::size_t i = 0; i < isolated; ++i) {
      if (std::isfinite(points[i])) add(points[i], points[i]);
    }
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
      const double value = (a * mid + b) * mid + c;
      if (value >= window_lo_ && value <= window_hi_) add(cuts[i], cuts[i + 1]);
    }
    if (ranges.size() <= 1) return;
    std::sort(ranges.begin(), ranges.end());
    std::size_t out = 0;
    for (std::size_t i = 1; i < ranges.size(); ++i) {
      if (ranges[i].first <= ranges[out].second + 1) {
        ranges[out].second = std::max(ranges[out].second, ranges[i].second);
      } else {
        ranges[++out] = ranges[i];
      }
    }
    ranges.resize(out + 1);
  }

  const TernaryForm& form_;
  std::int64_t lo_;
  std::int64_t hi_;
  double window_lo_;
  double window_hi_;
  int axis_ = 2;
  int outer_a_ = 0;
  int outer_b_ = 1;
};

void require_radius(double T, const char* where) {
  if (!(T >= 1.0) || !std::isfinite(T)) {
    throw_invalid(std::string(where) + ": requires T >= 1");
  }
}

}  // namespace

std::int64_t norm2(const IntVec3& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }

bool is_primitive(const IntVec3& v) {
  return std::gcd(std::gcd(v[0], v[1]), v[2]) == 1;
}

bool is_canonical(const IntVec3& v) {
  for (std::int64_t c : v) {
    if (c != 0) return c > 0;
  }
  return false;
}

bool enumeration_less(const IntVec3& lhs, const IntVec3& rhs) {
  const std::int64_t nl = norm2(lhs);
  const std::int64_t nr = norm2(rhs);
  if (nl != nr) return nl < nr;
  return lhs > rhs;
}

PrimitiveVectorStream::PrimitiveVectorStream(double T, EnumerationLimits limits)
    : limits_(limits) {
  require_radius(T, "primitive_vectors");
  max_norm2_ = max_norm2_for(T);
}

void PrimitiveVectorStream::refill() {
  buffer_.clear();
  cursor_ = 0;
  while (buffer_.empty() && next_lo_ <= max_norm2_) {
    const std::int64_t lo = next_lo_;
    const std::int64_t hi = std::min(max_norm2_, std::max<std::int64_t>(2 * lo, 8));
    next_lo_ = hi + 1;

    const std::int64_t x_max = isqrt(hi);
    for (std::int64_t x = 0; x <= x_max; ++x) {
      const std::int64_t y_max = isqrt(hi - x * x);
      for (std::int64_t y = (x == 0 ? 0 : -y_max); y <= y_max; ++y) {
        const std::int64_t r2 = x * x + y * y;
        const std::int64_t z_max = isqrt(hi - r2);
        const std::int64_t z_min = r2 >= lo ? 0 : ceil_isqrt(lo - r2);
        if (z_min > z_max) continue;
        for (std::int64_t z = -z_max; z <= z_max; ++z) {
          if (z > -z_min && z < z_min) z = z_min;
          const IntVec3 v{x, y, z};
          if (++visited_ > limits_.max_candidates) {
            throw CapacityExceeded("primitive_vectors: candidate ceiling exceeded");
          }
          if (is_canonical(v) && is_primitive(v)) buffer_.push_back(v);
        }
      }
    }
    std::sort(buffer_.begin(), buffer_.end(), enumeration_less);
  }
}

std::optional<IntVec3> PrimitiveVectorStream::next() {
  if (cursor_ >= buffer_.size()) refill();
  if (cursor_ >= buffer_.size()) return std::nullopt;
  return buffer_[cursor_++];
}

std::vector<IntVec3> primitive_vectors(double T, EnumerationLimits limits) {
  PrimitiveVectorStream stream(T, limits);
  std::vector<IntVec3> out;
  while (auto v = stream.next()) out.push_back(*v);
  return out;
}

std::optional<WitnessRecord> find_witness(const TernaryForm& form, double s, double eps,
                                          double T, EnumerationLimits limits) {
  if (!(eps > 0.0)) throw_invalid("find_witness: requires eps > 0");
  require_radius(T, "find_witness");
  const std::int64_t max_n2 = max_norm2_for(T);
  WorkBudget budget(limits);
  auto accept = [&](double value) { return std::abs(value - s) <= eps; };

  // Norm shells in doubling blocks: the first block holding any witness
  // holds the minimal one.
  std::int64_t lo = 1;
  while (lo <= max_n2) {
    const std::int64_t hi = std::min(max_n2, std::max<std::int64_t>(2 * lo, 16));
    const WindowScanner scanner(form, lo, hi, s - eps, s + eps);
    const std::int64_t p_max = scanner.outer_radius();
    const auto rows = static_cast<std::size_t>(2 * p_max + 1);
    std::vector<std::optional<IntVec3>> best(rows);
    parallel_for(rows, [&](std::size_t i) {
      const std::int64_t p = static_cast<std::int64_t>(i) - p_max;
      std::optional<IntVec3> local;
      const std::uint64_t work = scanner.scan_row(p, accept, [&](const IntVec3& v, double) {
        if (!is_canonical(v) || !is_primitive(v)) return;
        if (!local || enumeration_less(v, *local)) local = v;
      });
      budget.charge(work);
      best[i] = local;
    });

    std::optional<IntVec3> winner;
    for (const auto& candidate : best) {
      if (candidate && (!winner || enumeration_less(*candidate, *winner))) winner = candidate;
    }
    if (winner) {
      const double value = evaluate(form, *winner);
      return WitnessRecord{s, *winner, value, std::abs(value - s),
                           std::sqrt(static_cast<double>(norm2(*winner)))};
    }
    lo = hi + 1;
  }
  return std::nullopt;
}

std::vector<double> target_grid(double s_min, double s_max, double step) {
  if (!(s_min <= s_max)) throw_invalid("target_grid: requires s_min <= s_max");
  if (!(step > 0.0)) throw_invalid("target_grid: requires step > 0");
  const auto count = static_cast<std::size_t>(std::floor((s_max - s_min) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = s_min + static_cast<double>(i) * step;
  return grid;
}

WitnessTable witness_table(const TernaryForm& form, double s_min, double s_max, double step,
                           double eps, double T, EnumerationLimits limits) {
  WitnessTable table;
  std::size_t missing = 0;
  for (double s : target_grid(s_min, s_max, step)) {
    auto witness = find_witness(form, s, eps, T, limits);
    if (!witness) ++missing;
    table.rows.push_back({s, std::move(witness)});
  }
  table.missing_fraction =
      static_cast<double>(missing) / static_cast<double>(table.rows.size());
  return table;
}

std::int64_t count_values(const TernaryForm& form, double a, double b, double T,
                          EnumerationLimits limits) {
  if (!(a <= b)) throw_invalid("count_values: requires a <= b");
  require_radius(T, "count_values");
  const std::int64_t max_n2 = max_norm2_for(T);
  WorkBudget budget(limits);
  const WindowScanner scanner(form, 1, max_n2, a, b);
  const std::int64_t p_max = scanner.outer_radius();
  const auto rows = static_cast<std::size_t>(2 * p_max + 1);
  std::vector<std::int64_t> counts(rows, 0);
  auto accept = [&](double value) { return value >= a && value <= b; };
  parallel_for(rows, [&](std::size_t i) {
    const std::int64_t p = static_cast<std::int64_t>(i) - p_max;
    std::int64_t local = 0;
    budget.charge(scanner.scan_row(p, accept, [&](const IntVec3&, double) { ++local; }));
    counts[i] = local;
  });
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

MainTermEstimate main_term_constant(const TernaryForm& form, double delta,
                                    std::uint64_t samples, std::uint64_t seed) {
  if (!(delta > 0.0 && delta <= 0.1)) throw_invalid("main_term_constant: delta must lie in (0, 0.1]");
  if (samples < 10'000) throw_invalid("main_term_constant: requires at least 1e4 samples");
  const Signature sig = signature(form);  // throws DegenerateForm
  if (sig.positive == 0 || sig.negative == 0) {
    throw DefiniteForm("main_term_constant: form is definite");
  }

  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> inner(chunks, 0);  // |Q| ≤ δ/2
  std::vector<std::uint64_t> outer(chunks, 0);  // |Q| ≤ δ
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    auto rng = substream(seed, c);
    const std::uint64_t n = std::min(kChunk, samples - c * kChunk);
    std::uint64_t in = 0;
    std::uint64_t out = 0;
    for (std::uint64_t drawn = 0; drawn < n;) {
      const Vec3 v{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
      if (v[0] * v[0] + v[1] * v[1] + v[2] * v[2] > 1.0) continue;
      ++drawn;
      const double q = std::abs(evaluate(form, v));
      if (q <= delta) ++out;
      if (q <= 0.5 * delta) ++in;
    }
    inner[c] = in;
    outer[c] = out;
  });
  const double n_in = static_cast<double>(std::accumulate(inner.begin(), inner.end(), std::uint64_t{0}));
  const double n_out = static_cast<double>(std::accumulate(outer.begin(), outer.end(), std::uint64_t{0}));
  const double n = static_cast<double>(samples);

  // E(d) = vol·P(|Q| ≤ d)/(2d) = C - c·√d + O(d); the √d term comes from
  // the apex of the cone. Eliminate it with weights √2/(√2-1), -1/(√2-1).
  const double vol = 4.0 * std::numbers::pi / 3.0;
  const double w_half = std::numbers::sqrt2 / (std::numbers::sqrt2 - 1.0);
  const double w_full = -1.0 / (std::numbers::sqrt2 - 1.0);
  // Per-sample contribution of a point with |Q| ≤ δ/2, resp. δ/2 < |Q| ≤ δ.
  const double y_in = vol * (w_half / delta + w_full / (2.0 * delta));
  const double y_mid = vol * (w_full / (2.0 * delta));
  const double n_mid = n_out - n_in;
  const double mean = (n_in * y_in + n_mid * y_mid) / n;
  const double second = (n_in * y_in * y_in + n_mid * y_mid * y_mid) / n;
  const double variance = std::max(0.0, second - mean * mean);
  return {mean, std::sqrt(variance / n)};
}

std::vector<CountReport> count_vs_main_term(const TernaryForm& form, double a, double b,
                                            std::span<const double> T_list,
                                            const MainTermOptions& options,
                                            EnumerationLimits limits) {
  const MainTermEstimate cq =
      main_term_constant(form, options.delta, options.samples, options.seed);
  std::vector<CountReport> reports;
  reports.reserve(T_list.size());
  for (double T : T_list) {
    CountReport r;
    r.a = a;
    r.b = b;
    r.T = T;
    r.count = count_values(form, a, b, T, limits);
    r.c_q = cq.value;
    r.c_q_stderr = cq.std_error;
    r.main_term = cq.value * (b - a) * T;
    r.degenerate_window = !(b > a);
    r.ratio = r.degenerate_window ? std::numeric_limits<double>::quiet_NaN()
                                  : static_cast<double>(r.count) / r.main_term;
    reports.push_back(r);
  }
  return reports;
}

}  // namespace opplab
