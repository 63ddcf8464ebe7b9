#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "opplab/enumerate.hpp"
#include "opplab/forms.hpp"

namespace opplab {

using Mat3 = Eigen::Matrix3d;

inline constexpr double kUnimodularTolerance = 1e-10;

// Element of SL₃(ℝ). Construction checks |det − 1| ≤ 1e-10.
class GroupElement {
 public:
  explicit GroupElement(const Mat3& m);
  static GroupElement identity() { return GroupElement(Mat3::Identity()); }

  const Mat3& matrix() const { return m_; }
  GroupElement inverse() const;

  friend GroupElement operator*(const GroupElement& a, const GroupElement& b) {
    return GroupElement(a.m_ * b.m_, Unchecked{});
  }

 private:
  struct Unchecked {};
  GroupElement(const Mat3& m, Unchecked) : m_(m) {}

  Mat3 m_;
};

// a_t = diag(e^t, 1, e^{-t})
GroupElement flow_a(double t);
// u_r: upper unipotent with (1,2) = (2,3) = r and (1,3) = r²/2
GroupElement flow_u(double r);
// v_{s,z}: upper unipotent with (1,2) = -s, (2,3) = s, (1,3) = z
GroupElement v_elem(double s, double z);

// Point gℤ³ of X = SL₃(ℝ)/SL₃(ℤ); the columns of the basis span the lattice.
class LatticePoint {
 public:
  explicit LatticePoint(const Mat3& basis);
  static LatticePoint standard() { return LatticePoint(Mat3::Identity()); }

  const Mat3& basis() const { return basis_; }

 private:
  friend LatticePoint act(const GroupElement& g, const LatticePoint& x);
  struct Unchecked {};
  LatticePoint(const Mat3& basis, Unchecked) : basis_(basis) {}

  Mat3 basis_;
};

// Same point of X: g₂⁻¹g₁ is integral with determinant 1.
bool same_point(const LatticePoint& x, const LatticePoint& y, double tolerance = 1e-8);

LatticePoint act(const GroupElement& g, const LatticePoint& x);

struct ShortVector {
  // Coefficients with respect to x.basis(); the vector itself is basis·v.
  IntVec3 v{};
  double length = 0.0;
};

struct LatticeLimits {
  std::uint64_t max_nodes = 50'000'000;
};

// Nonzero lattice vector of minimal Euclidean length (LLL reduction then
// exhaustive enumeration in the reduced basis).
ShortVector shortest_vector(const LatticePoint& x, LatticeLimits limits = {});

// Calls visit(vector, coefficients) for every nonzero lattice vector with
// ‖vector‖ < radius. Coefficients refer to x.basis().
void for_each_vector_in_ball(const LatticePoint& x, double radius,
                             const std::function<void(const Eigen::Vector3d&, const IntVec3&)>& visit,
                             LatticeLimits limits = {});

struct Basepoint {
  GroupElement g;
  LatticePoint x0;
  // Q(v) = sign · sqf(g v)
  int sign = 1;
};

// For Q with |det Q| = 1 and indefinite, returns g ∈ SL₃(ℝ) with
// Q(v) = sign·sqf(gv); sign = −1 exactly when det Q = +1 (signature (1,2)),
// since sqf itself has det −1. Checks the identity on random unit vectors and
// throws SignatureMismatch when the form is not in the class.
Basepoint form_to_basepoint(const TernaryForm& form);

// f(v) = exp(1 − 1/(1 − ‖v‖²/ρ²)) for ‖v‖ < ρ, 0 outside.
class RadialBump {
 public:
  explicit RadialBump(double radius);

  double radius() const { return radius_; }
  double operator()(const Eigen::Vector3d& v) const;
  // ∫_{ℝ³} f by composite Gauss-Legendre quadrature of the radial profile.
  double mass() const { return mass_; }

 private:
  double radius_;
  double mass_;
};

// F(x) = Σ_{v ∈ x, v ≠ 0} f(v).
double siegel_transform(const LatticePoint& x, const RadialBump& f, LatticeLimits limits = {});

struct EquidistReport {
  double T = 0.0;
  std::size_t samples = 0;
  double empirical = 0.0;
  // ∫ f dv, which equals the Haar mean of the Siegel transform.
  double haar = 0.0;
  double deviation = 0.0;
  // Smallest shortest-vector length among the sampled lattices.
  double min_injectivity = 0.0;
};

// Average of F over a_{log T}u_r x0 with r_i = (i + U_i)/N, U_i uniform
// jitter from substream (seed, i).
EquidistReport siegel_average(double f_radius, const LatticePoint& x0, double T,
                              std::size_t samples, std::uint64_t seed,
                              LatticeLimits limits = {});

std::vector<EquidistReport> discrepancy_scan(const TernaryForm& form,
                                             std::span<const double> T_list,
                                             std::size_t samples, double f_radius,
                                             std::uint64_t seed, LatticeLimits limits = {});

}  // namespace opplab
