#include "opplab/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "opplab/errors.hpp"
#include "opplab/parallel.hpp"
#include "opplab/random.hpp"

namespace opplab {
namespace {

constexpr double kInverseFactorial[5] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};

double dist2(const PlaneVector& a, const PlaneVector& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

double dist2(const RepVector& a, const RepVector& b) {
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Neighbor counting on a uniform grid of cell size b.
std::vector<std::size_t> count_within(const std::vector<PlaneVector>& images, double b) {
  const std::size_t n = images.size();
  std::vector<std::size_t> counts(n, 0);
  const double b2 = b * b;
  if (!(b > 0.0)) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) counts[i] += dist2(images[i], images[j]) <= b2 ? 1 : 0;
    }
    return counts;
  }
  using Cell = std::pair<std::int64_t, std::int64_t>;
  std::vector<std::pair<Cell, std::size_t>> cells(n);
  for (std::size_t i = 0; i < n; ++i) {
    cells[i] = {{static_cast<std::int64_t>(std::floor(images[i][0] / b)),
                 static_cast<std::int64_t>(std::floor(images[i][1] / b))},
                i};
  }
  std::sort(cells.begin(), cells.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Cell home{static_cast<std::int64_t>(std::floor(images[i][0] / b)),
                    static_cast<std::int64_t>(std::floor(images[i][1] / b))};
    std::size_t count = 0;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      const Cell from{home.first + dx, home.second - 1};
      const Cell to{home.first + dx, home.second + 1};
      auto it = std::lower_bound(cells.begin(), cells.end(), std::pair{from, std::size_t{0}});
      for (; it != cells.end() && it->first <= to; ++it) {
        count += dist2(images[i], images[it->second]) <= b2 ? 1 : 0;
      }
    }
    counts[i] = count;
  }
  return counts;
}

}  // namespace

double norm(const RepVector& w) {
  double s = 0.0;
  for (double x : w) s += x * x;
  return std::sqrt(s);
}

double norm(const PlaneVector& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1]); }

PlaneVector plus_part(const RepVector& w) { return {w[0], w[1]}; }

RepVector operator-(const RepVector& a, const RepVector& b) {
  RepVector out;
  for (int i = 0; i < 5; ++i) out[i] = a[i] - b[i];
  return out;
}

RepVector adjoint_u(double r, const RepVector& w) {
  double powers[5] = {1.0, r, r * r, r * r * r, r * r * r * r};
  RepVector out{};
  for (int i = 0; i < 5; ++i) {
    double s = 0.0;
    for (int k = i; k < 5; ++k) s += w[k] * powers[k - i] * kInverseFactorial[k - i];
    out[i] = s;
  }
  return out;
}

RepVector adjoint_a(double t, const RepVector& w) {
  RepVector out;
  for (int i = 0; i < 5; ++i) out[i] = std::exp(static_cast<double>(2 - i) * t) * w[i];
  return out;
}

PlaneVector xi(double r, const RepVector& w) { return plus_part(adjoint_u(r, w)); }

double FiniteConfig::weight(std::size_t i) const {
  return weights.empty() ? 1.0 / static_cast<double>(points.size()) : weights[i];
}

void FiniteConfig::validate(bool unit_ball) const {
  if (points.empty()) throw EmptyConfig("configuration has no points");
  if (!weights.empty()) {
    if (weights.size() != points.size()) {
      throw_invalid("configuration weights do not match the number of points");
    }
    if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w >= 0.0); })) {
      throw_invalid("configuration weights must be nonnegative");
    }
    if (std::abs(compensated_sum(weights) - 1.0) > 1e-12) {
      throw_invalid("configuration weights must sum to 1");
    }
  }
  if (unit_ball) {
    for (const RepVector& w : points) {
      if (norm(w) > 1.0 + 1e-12) throw_invalid("configuration point outside the unit ball");
    }
  }
}

FiniteConfig uniform_ball_config(std::size_t n, double radius, std::uint64_t seed) {
  FiniteConfig config;
  config.points.reserve(n);
  auto rng = substream(seed, 0);
  while (config.points.size() < n) {
    RepVector w;
    for (double& x : w) x = uniform(rng, -1.0, 1.0);
    if (norm(w) > 1.0) continue;
    for (double& x : w) x *= radius;
    config.points.push_back(w);
  }
  return config;
}

double nonconcentration_constant(const FiniteConfig& theta, double alpha, double b1) {
  theta.validate(true);
  if (!(alpha > 0.0)) throw_invalid("nonconcentration_constant: requires alpha > 0");
  if (!(b1 > 0.0 && b1 <= 1.0)) throw_invalid("nonconcentration_constant: requires b1 in (0, 1]");

  std::vector<double> scales;
  for (double b = 1.0; b >= b1; b *= 0.5) scales.push_back(b);
  const std::size_t n = theta.size();
  std::vector<double> per_center(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> d2(n);
    for (std::size_t j = 0; j < n; ++j) d2[j] = dist2(theta.points[i], theta.points[j]);
    std::sort(d2.begin(), d2.end());
    double worst = 0.0;
    for (double b : scales) {
      const auto count =
          static_cast<double>(std::upper_bound(d2.begin(), d2.end(), b * b) - d2.begin());
      worst = std::max(worst, count / (std::pow(b, alpha) * static_cast<double>(n)));
    }
    per_center[i] = worst;
  });
  return *std::max_element(per_center.begin(), per_center.end());
}

std::vector<std::size_t> projection_concentration(const FiniteConfig& theta, double r, double b) {
  std::vector<PlaneVector> images(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) images[i] = xi(r, theta.points[i]);
  return count_within(images, b);
}

void ProjectionParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw_invalid("projection: alpha must lie in (0, 2]");
  if (!(b1 > 0.0 && b1 <= 1.0)) throw_invalid("projection: b1 must lie in (0, 1]");
  if (!(b >= b1)) throw_invalid("projection: requires b >= b1");
  if (!(eps > 0.0 && eps < 1e-4 * alpha)) throw_invalid("projection: eps must lie in (0, 1e-4*alpha)");
  if (egbd && !(*egbd >= 1.0)) throw_invalid("projection: egbd must be >= 1");
  if (!(C > 0.0) || !(c >= 0.0)) throw_invalid("projection: thresholds C, c must be positive");
}

std::vector<double> unit_grid(std::size_t n) {
  if (n == 0) throw_invalid("unit_grid: requires at least one point");
  std::vector<double> grid(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

ProjectionSurvey projection_survey(const FiniteConfig& theta, const ProjectionParams& params,
                                   std::span<const double> r_grid) {
  theta.validate(true);
  params.validate();
  for (double r : r_grid) {
    if (!(r >= 0.0 && r <= 1.0)) throw_invalid("projection_survey: r_grid must lie in [0, 1]");
  }

  ProjectionSurvey survey;
  survey.egbd = params.egbd.value_or(
      std::max(1.0, nonconcentration_constant(theta, params.alpha, params.b1)));
  const auto n = static_cast<double>(theta.size());
  survey.count_bound = params.C * survey.egbd *
                       std::pow(params.b, params.alpha - params.c * params.eps) * n;

  const double floor2 = params.b * params.b;
  const bool square = params.alpha == 2.0;
  survey.rows.resize(r_grid.size());
  parallel_for(r_grid.size(), [&](std::size_t k) {
    const double r = r_grid[k];
    std::vector<PlaneVector> images(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) images[i] = xi(r, theta.points[i]);
    const std::vector<std::size_t> counts = count_within(images, params.b);

    SurveyRow row;
    row.r = r;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      row.max_count = std::max(row.max_count, counts[i]);
      if (static_cast<double>(counts[i]) > survey.count_bound) {
        row.exceptional_fraction += theta.weight(i);
      }
    }
    row.exceptional = row.exceptional_fraction > params.exceptional_mass;

    std::vector<double> energy(theta.size(), 0.0);
    for (std::size_t i = 0; i < images.size(); ++i) {
      for (std::size_t j = i + 1; j < images.size(); ++j) {
        const double d2 = std::max(dist2(images[i], images[j]), floor2);
        const double term = square ? 1.0 / d2 : std::pow(d2, -0.5 * params.alpha);
        energy[i] += term;
        energy[j] += term;
      }
    }
    for (double& e : energy) e /= n;
    row.energy_median = quantile(energy, 0.5);
    row.energy_p95 = quantile(std::move(energy), 0.95);
    survey.rows[k] = row;
  });

  const auto exceptional = std::count_if(survey.rows.begin(), survey.rows.end(),
                                         [](const SurveyRow& row) { return row.exceptional; });
  survey.exceptional_r_fraction =
      r_grid.empty() ? 0.0 : static_cast<double>(exceptional) / static_cast<double>(r_grid.size());
  return survey;
}

void MargulisParams::validate() const {
  if (!(b > 0.0 && b <= 0.1)) throw_invalid("margulis: b must lie in (0, 1/10]");
  if (!(alpha > 0.0)) throw_invalid("margulis: alpha must be positive");
  if (!(inj > 0.0)) throw_invalid("margulis: inj must be positive");
}

double margulis_value(std::span<const RepVector> neighbors, const MargulisParams& params) {
  params.validate();
  if (neighbors.size() <= params.M) return std::pow(params.b * params.inj, -params.alpha);

  std::vector<double> norms(neighbors.size());
  for (std::size_t i = 0; i < neighbors.size(); ++i) norms[i] = norm(neighbors[i]);
  std::vector<std::size_t> order(neighbors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(params.M),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      return norms[a] != norms[b] ? norms[a] < norms[b] : a < b;
                    });
  std::vector<char> dropped(neighbors.size(), 0);
  for (std::size_t k = 0; k < params.M; ++k) dropped[order[k]] = 1;

  double sum = 0.0;
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    if (!dropped[i]) sum += std::pow(norms[i], -params.alpha);
  }
  return sum;
}

ExpansionCheck expansion_check(const RepVector& w, double r, double ell) {
  if (!(ell >= 0.0)) throw_invalid("expansion_check: requires ell >= 0");
  const RepVector moved = adjoint_u(r, w);
  ExpansionCheck check;
  check.lhs = norm(adjoint_a(ell, moved));
  check.rhs = std::exp(ell) * norm(plus_part(moved));
  check.ok = check.lhs >= check.rhs - 1e-9 * std::max(1.0, check.rhs);
  return check;
}

std::vector<RepVector> neighbors_within(std::span<const RepVector> points, std::size_t i,
                                        double b) {
  std::vector<RepVector> out;
  const double b2 = b * b;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (k == i) continue;
    const double d2 = dist2(points[k], points[i]);
    if (d2 > 0.0 && d2 < b2) out.push_back(points[k] - points[i]);
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

ImprovementStats improvement_step_sim(const FiniteConfig& F, double alpha, double ell, double b,
                                      std::size_t r_samples, std::size_t M, std::uint64_t seed) {
  F.validate(false);
  if (!(alpha > 0.0 && alpha < 2.0)) throw_invalid("improvement_step_sim: alpha must lie in (0, 2)");
  if (!(ell >= 0.0)) throw_invalid("improvement_step_sim: requires ell >= 0");
  if (r_samples == 0) throw_invalid("improvement_step_sim: requires r_samples >= 1");
  MargulisParams params;
  params.b = b;
  params.M = M;
  params.alpha = alpha;
  params.ell = ell;
  params.validate();

  const std::size_t n = F.size();
  std::vector<double> old_energy(n);
  parallel_for(n, [&](std::size_t i) {
    old_energy[i] = margulis_value(neighbors_within(F.points, i, b), params);
  });

  ImprovementStats stats;
  stats.rows.resize(r_samples);
  std::vector<std::vector<double>> ratios(r_samples);
  std::vector<double> new_means(r_samples);
  parallel_for(r_samples, [&](std::size_t j) {
    auto rng = substream(seed, j);
    const double rho = (static_cast<double>(j) + uniform01(rng)) / static_cast<double>(r_samples);
    std::vector<RepVector> moved(n);
    for (std::size_t k = 0; k < n; ++k) moved[k] = adjoint_a(ell, adjoint_u(rho, F.points[k]));

    SurveyRow row;
    row.r = rho;
    std::vector<double> local(n);
    std::vector<double> fresh(n);
    std::size_t grew = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<RepVector> nb = neighbors_within(moved, i, b);
      row.max_count = std::max(row.max_count, nb.size());
      fresh[i] = margulis_value(nb, params);
      local[i] = fresh[i] / old_energy[i];
      grew += local[i] > 1.0 ? 1 : 0;
    }
    row.exceptional_fraction = static_cast<double>(grew) / static_cast<double>(n);
    row.energy_median = quantile(local, 0.5);
    row.energy_p95 = quantile(local, 0.95);
    stats.rows[j] = row;
    new_means[j] = compensated_sum(fresh) / static_cast<double>(n);
    ratios[j] = std::move(local);
  });

  std::vector<double> pooled;
  pooled.reserve(n * r_samples);
  for (const auto& r : ratios) pooled.insert(pooled.end(), r.begin(), r.end());
  stats.median_ratio = quantile(pooled, 0.5);
  stats.p95_ratio = quantile(std::move(pooled), 0.95);
  stats.mean_old_energy = compensated_sum(old_energy) / static_cast<double>(n);
  stats.mean_new_energy = compensated_sum(new_means) / static_cast<double>(r_samples);
  return stats;
}

}  // namespace opplab
