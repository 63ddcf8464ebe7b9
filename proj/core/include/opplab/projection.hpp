#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace opplab {

// Vector of the 5-dimensional irreducible representation in the weight
// basis; coordinate i has a_t-weight 2 − i. Coordinates are orthonormal, so
// the positive-weight part w⁺ is simply (w₀, w₁).
using RepVector = std::array<double, 5>;
using PlaneVector = std::array<double, 2>;

double norm(const RepVector& w);
double norm(const PlaneVector& p);
PlaneVector plus_part(const RepVector& w);
RepVector operator-(const RepVector& a, const RepVector& b);

// Exponential of the coordinate shift (Nw)_i = w_{i+1}:
// (Ad(u_r)w)_i = Σ_{k≥i} w_k r^{k−i}/(k−i)!.
RepVector adjoint_u(double r, const RepVector& w);
// Coordinate i scaled by e^{(2−i)t}.
RepVector adjoint_a(double t, const RepVector& w);
// ξ_r(w) = (Ad(u_r)w)⁺.
PlaneVector xi(double r, const RepVector& w);

// Finite set of representation vectors with optional probability weights.
struct FiniteConfig {
  std::vector<RepVector> points;
  // Empty means uniform.
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double weight(std::size_t i) const;
  // Throws EmptyConfig / InvalidArgument when weights are malformed or, with
  // unit_ball set, a point lies outside the closed unit ball.
  void validate(bool unit_ball) const;
};

// n points uniform in the ball of the given radius (rejection sampling).
FiniteConfig uniform_ball_config(std::size_t n, double radius, std::uint64_t seed);

// max over w ∈ Θ and dyadic b = 2^{-j} ∈ [b₁, 1] of
// #(B(w,b) ∩ Θ) / (b^α · #Θ): the least constant for which the
// non-concentration hypothesis holds on those scales.
double nonconcentration_constant(const FiniteConfig& theta, double alpha, double b1);

// For each w, #{w′ ∈ Θ : |ξ_r(w′) − ξ_r(w)| ≤ b}, counting w itself.
std::vector<std::size_t> projection_concentration(const FiniteConfig& theta, double r, double b);

struct ProjectionParams {
  double alpha = 2.0;
  double b1 = 0.02;
  double b = 0.02;
  // Must lie in (0, 1e-4·α).
  double eps = 1e-4;
  // Measured from Θ (and clamped to ≥ 1) when unset.
  std::optional<double> egbd;
  // Per-point bound C·egbd·b^{α − c·eps}·#Θ.
  double C = 10.0;
  double c = 10.0;
  // r counts as exceptional when more than this mass of Θ violates the bound.
  double exceptional_mass = 0.05;

  void validate() const;
};

struct SurveyRow {
  double r = 0.0;
  // Mass of Θ (by weight) violating the per-point bound at this r.
  double exceptional_fraction = 0.0;
  std::size_t max_count = 0;
  // Quantiles over w of (1/#Θ) Σ_{w′≠w} max(|ξ_r(w) − ξ_r(w′)|, b)^{−α}.
  double energy_median = 0.0;
  double energy_p95 = 0.0;
  bool exceptional = false;
};

struct ProjectionSurvey {
  std::vector<SurveyRow> rows;
  double egbd = 1.0;
  double count_bound = 0.0;
  // Fraction of r-grid points flagged exceptional.
  double exceptional_r_fraction = 0.0;
};

ProjectionSurvey projection_survey(const FiniteConfig& theta, const ProjectionParams& params,
                                   std::span<const double> r_grid);

// Equispaced grid of n points on [0, 1] (n = 1 gives {0}).
std::vector<double> unit_grid(std::size_t n);

struct MargulisParams {
  double b = 0.1;
  std::size_t M = 0;
  double alpha = 1.0;
  // Injectivity radius; identically 1 in the linearized simulator.
  double inj = 1.0;
  double ell = 0.0;
  double s = 0.0;
  double kappa = 0.0;

  void validate() const;
};

// Truncated Margulis function: (b·inj)^{−α} when at most M neighbors,
// otherwise Σ‖w‖^{−α} over the neighbors left after discarding the M of
// smallest norm (the largest terms), which realizes the minimum over
// discard sets. Kept terms are summed in input order.
double margulis_value(std::span<const RepVector> neighbors, const MargulisParams& params);

struct ExpansionCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

// lhs = ‖Ad(a_ℓ)Ad(u_r)w‖, rhs = e^ℓ‖(Ad(u_r)w)⁺‖; ok when lhs ≥ rhs up to
// 1e-9 relative slack.
ExpansionCheck expansion_check(const RepVector& w, double r, double ell);

struct ImprovementStats {
  // One row per sampled ρ: exceptional_fraction is the share of points whose
  // energy grew, max_count the largest transported neighbor count, and the
  // energy columns are quantiles of the new/old energy ratio.
  std::vector<SurveyRow> rows;
  double median_ratio = 0.0;
  double p95_ratio = 0.0;
  double mean_old_energy = 0.0;
  double mean_new_energy = 0.0;
};

// Neighbors of point i within distance b: displacements F_k − F_i.
std::vector<RepVector> neighbors_within(std::span<const RepVector> points, std::size_t i,
                                        double b);

// Transports F by Ad(a_ℓ)∘Ad(u_ρ) for stratified ρ ∈ [0,1] and compares the
// truncated energy of every point before and after.
ImprovementStats improvement_step_sim(const FiniteConfig& F, double alpha, double ell, double b,
                                      std::size_t r_samples, std::size_t M, std::uint64_t seed);

// q-quantile (nearest rank on the sorted copy).
double quantile(std::vector<double> values, double q);

}  // namespace opplab
