#include "opplab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "opplab/errors.hpp"
#include "opplab/lattice_reduction.hpp"
#include "opplab/parallel.hpp"
#include "opplab/random.hpp"

namespace opplab {
namespace {

void require_unimodular(const Mat3& m, const char* what) {
  const double det = m.determinant();
  if (!(std::abs(det - 1.0) <= kUnimodularTolerance)) {
    throw InvalidArgument(std::string(what) + ": determinant " + std::to_string(det) + " is not 1");
  }
}

struct ReducedBasis {
  Mat3 basis;    // columns, LLL-reduced
  Mat3 to_input; // input coefficients = to_input · reduced coefficients
};

ReducedBasis reduce(const Mat3& basis) {
  Eigen::MatrixXd rows = basis.transpose();
  const Eigen::MatrixXd u = lll_reduce_rows(rows);
  return {rows.transpose(), u.transpose()};
}

IntVec3 to_int(const Eigen::Vector3d& c) {
  return {std::llround(c(0)), std::llround(c(1)), std::llround(c(2))};
}

// Fincke-Pohst enumeration of c ∈ ℤ³ \ {0} with ‖B c‖² ≤ bound2.
template <class Visit>
void enumerate_ball(const Mat3& basis, double bound2, LatticeLimits limits, const Visit& visit) {
  const Eigen::HouseholderQR<Mat3> qr(basis);
  const Mat3 r = qr.matrixQR().triangularView<Eigen::Upper>();
  std::uint64_t nodes = 0;
  auto charge = [&] {
    if (++nodes > limits.max_nodes) {
      throw CapacityExceeded("lattice enumeration exceeded node limit");
    }
  };
  auto range = [](double center_term, double rii, double rem) {
    const double half = std::sqrt(std::max(rem, 0.0));
    const double a = (-half - center_term) / rii;
    const double b = (half - center_term) / rii;
    return std::pair{static_cast<long long>(std::ceil(std::min(a, b) - 1e-9)),
                     static_cast<long long>(std::floor(std::max(a, b) + 1e-9))};
  };

  const auto [c3_lo, c3_hi] = range(0.0, r(2, 2), bound2);
  for (long long c3 = c3_lo; c3 <= c3_hi; ++c3) {
    charge();
    const double t3 = r(2, 2) * static_cast<double>(c3);
    const double rem3 = bound2 - t3 * t3;
    if (rem3 < -1e-12 * bound2) continue;
    const double s2 = r(1, 2) * static_cast<double>(c3);
    const auto [c2_lo, c2_hi] = range(s2, r(1, 1), rem3);
    for (long long c2 = c2_lo; c2 <= c2_hi; ++c2) {
      charge();
      const double t2 = r(1, 1) * static_cast<double>(c2) + s2;
      const double rem2 = rem3 - t2 * t2;
      if (rem2 < -1e-12 * bound2) continue;
      const double s1 = r(0, 1) * static_cast<double>(c2) + r(0, 2) * static_cast<double>(c3);
      const auto [c1_lo, c1_hi] = range(s1, r(0, 0), rem2);
      for (long long c1 = c1_lo; c1 <= c1_hi; ++c1) {
        charge();
        if (c1 == 0 && c2 == 0 && c3 == 0) continue;
        const Eigen::Vector3d c(static_cast<double>(c1), static_cast<double>(c2),
                                static_cast<double>(c3));
        visit(c, basis * c);
      }
    }
  }
}

}  // namespace

GroupElement::GroupElement(const Mat3& m) : m_(m) { require_unimodular(m, "GroupElement"); }

GroupElement GroupElement::inverse() const { return GroupElement(m_.inverse(), Unchecked{}); }

GroupElement flow_a(double t) {
  Mat3 m = Mat3::Zero();
  m(0, 0) = std::exp(t);
  m(1, 1) = 1.0;
  m(2, 2) = std::exp(-t);
  return GroupElement(m);
}

GroupElement flow_u(double r) {
  Mat3 m = Mat3::Identity();
  m(0, 1) = r;
  m(1, 2) = r;
  m(0, 2) = 0.5 * r * r;
  return GroupElement(m);
}

GroupElement v_elem(double s, double z) {
  Mat3 m = Mat3::Identity();
  m(0, 1) = -s;
  m(1, 2) = s;
  m(0, 2) = z;
  return GroupElement(m);
}

LatticePoint::LatticePoint(const Mat3& basis) : basis_(basis) {
  require_unimodular(basis, "LatticePoint");
}

bool same_point(const LatticePoint& x, const LatticePoint& y, double tolerance) {
  const Mat3 change = y.basis().partialPivLu().solve(x.basis());
  Mat3 rounded;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      rounded(i, j) = std::round(change(i, j));
      if (std::abs(change(i, j) - rounded(i, j)) > tolerance) return false;
    }
  }
  return std::llround(rounded.determinant()) == 1;
}

LatticePoint act(const GroupElement& g, const LatticePoint& x) {
  // det(g·basis) = 1 holds exactly; recomputing it for a badly conditioned
  // product would only measure rounding, so skip the constructor check.
  return LatticePoint(g.matrix() * x.basis(), LatticePoint::Unchecked{});
}

void for_each_vector_in_ball(
    const LatticePoint& x, double radius,
    const std::function<void(const Eigen::Vector3d&, const IntVec3&)>& visit,
    LatticeLimits limits) {
  if (!(radius > 0.0)) return;
  const ReducedBasis reduced = reduce(x.basis());
  const double r2 = radius * radius;
  enumerate_ball(reduced.basis, r2 * (1.0 + 1e-12), limits,
                 [&](const Eigen::Vector3d& c, const Eigen::Vector3d& v) {
                   if (v.squaredNorm() < r2) visit(v, to_int(reduced.to_input * c));
                 });
}

ShortVector shortest_vector(const LatticePoint& x, LatticeLimits limits) {
  const ReducedBasis reduced = reduce(x.basis());
  const double bound2 = reduced.basis.col(0).squaredNorm() * (1.0 + 1e-12);
  double best2 = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_c = Eigen::Vector3d::Zero();
  enumerate_ball(reduced.basis, bound2, limits,
                 [&](const Eigen::Vector3d& c, const Eigen::Vector3d& v) {
                   const double n2 = v.squaredNorm();
                   if (n2 < best2) {
                     best2 = n2;
                     best_c = c;
                   }
                 });
  return {to_int(reduced.to_input * best_c), std::sqrt(best2)};
}

Basepoint form_to_basepoint(const TernaryForm& form) {
  const double det = determinant(form);
  if (!(std::abs(std::abs(det) - 1.0) <= 1e-9)) {
    throw SignatureMismatch("form_to_basepoint: requires |det Q| = 1");
  }
  const Signature sig = signature(form);
  if (sig.positive == 0 || sig.negative == 0) {
    throw SignatureMismatch("form_to_basepoint: form is definite");
  }
  const int sign = det > 0.0 ? -1 : 1;

  // M = Bᵀ J B with J = diag(-1, 1, 1) (eigenvalues ascending).
  auto factor = [](const Mat3& gram) {
    const Eigen::SelfAdjointEigenSolver<Mat3> solver(gram);
    const Eigen::Vector3d scale = solver.eigenvalues().cwiseAbs().cwiseSqrt();
    return Mat3(scale.asDiagonal() * solver.eigenvectors().transpose());
  };
  const Mat3 b = factor(static_cast<double>(sign) * form.gram());
  const Mat3 c = factor(standard_form().gram());
  Mat3 g = c.inverse() * b;
  if (g.determinant() < 0.0) g = -g;

  // Self-check of Q(v) = sign·sqf(gv) on random unit vectors.
  const TernaryForm reference = standard_form();
  auto rng = substream(0x5eedULL, 0);
  double residual = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::Vector3d v(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    if (v.norm() == 0.0) continue;
    v.normalize();
    const Eigen::Vector3d gv = g * v;
    residual = std::max(residual, std::abs(evaluate(form, Vec3{v(0), v(1), v(2)}) -
                                           sign * evaluate(reference, Vec3{gv(0), gv(1), gv(2)})));
  }
  if (residual > 1e-9) {
    throw SignatureMismatch("form_to_basepoint: congruence residual " + std::to_string(residual));
  }
  return {GroupElement(g), LatticePoint(g), sign};
}

RadialBump::RadialBump(double radius) : radius_(radius) {
  if (!(radius > 0.0)) throw_invalid("RadialBump: radius must be positive");
  // ∫ f = 4πρ³ ∫₀¹ φ(t) t² dt, with φ(t) = exp(1 − 1/(1 − t²)). The profile
  // is C^∞ and flat at t = 1, so composite Gauss-Legendre converges fast.
  static constexpr double kNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                       0.5384693101056831, 0.9061798459386640};
  static constexpr double kWeights[5] = {0.2369268850561891, 0.4786286704993665,
                                         0.5688888888888889, 0.4786286704993665,
                                         0.2369268850561891};
  constexpr int kPanels = 2048;
  CompensatedAccumulator acc;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = static_cast<double>(p) / kPanels;
    const double half = 0.5 / kPanels;
    for (int k = 0; k < 5; ++k) {
      const double t = lo + half * (1.0 + kNodes[k]);
      acc.add(half * kWeights[k] * std::exp(1.0 - 1.0 / (1.0 - t * t)) * t * t);
    }
  }
  mass_ = 4.0 * std::numbers::pi * radius * radius * radius * acc.value();
}

double RadialBump::operator()(const Eigen::Vector3d& v) const {
  const double t2 = v.squaredNorm() / (radius_ * radius_);
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

double siegel_transform(const LatticePoint& x, const RadialBump& f, LatticeLimits limits) {
  CompensatedAccumulator acc;
  for_each_vector_in_ball(
      x, f.radius(), [&](const Eigen::Vector3d& v, const IntVec3&) { acc.add(f(v)); }, limits);
  return acc.value();
}

EquidistReport siegel_average(double f_radius, const LatticePoint& x0, double T,
                              std::size_t samples, std::uint64_t seed, LatticeLimits limits) {
  if (!(T > 1.0)) throw_invalid("siegel_average: requires T > 1");
  if (samples < 10) throw_invalid("siegel_average: requires at least 10 samples");
  const RadialBump bump(f_radius);
  const GroupElement push = flow_a(std::log(T));

  std::vector<double> values(samples);
  std::vector<double> shortest(samples);
  parallel_for(samples, [&](std::size_t i) {
    auto rng = substream(seed, i);
    const double r = (static_cast<double>(i) + uniform01(rng)) / static_cast<double>(samples);
    const LatticePoint x = act(push * flow_u(r), x0);
    values[i] = siegel_transform(x, bump, limits);
    shortest[i] = shortest_vector(x, limits).length;
  });

  EquidistReport report;
  report.T = T;
  report.samples = samples;
  report.empirical = compensated_sum(values) / static_cast<double>(samples);
  report.haar = bump.mass();
  report.deviation = std::abs(report.empirical - report.haar);
  report.min_injectivity = *std::min_element(shortest.begin(), shortest.end());
  return report;
}

std::vector<EquidistReport> discrepancy_scan(const TernaryForm& form,
                                             std::span<const double> T_list,
                                             std::size_t samples, double f_radius,
                                             std::uint64_t seed, LatticeLimits limits) {
  const Basepoint base = form_to_basepoint(normalize(form).form.form());
  std::vector<EquidistReport> reports;
  reports.reserve(T_list.size());
  for (double T : T_list) {
    reports.push_back(siegel_average(f_radius, base.x0, T, samples, seed, limits));
  }
  return reports;
}

}  // namespace opplab
