#include "opplab/forms.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "opplab/errors.hpp"

namespace opplab {

TernaryForm TernaryForm::from_gram(const Eigen::Matrix3d& gram) {
  return {gram(0, 0),
          gram(1, 1),
          gram(2, 2),
          0.5 * (gram(0, 1) + gram(1, 0)),
          0.5 * (gram(0, 2) + gram(2, 0)),
          0.5 * (gram(1, 2) + gram(2, 1))};
}

Eigen::Matrix3d TernaryForm::gram() const {
  Eigen::Matrix3d m;
  m << m11, m12, m13,
       m12, m22, m23,
       m13, m23, m33;
  return m;
}

double TernaryForm::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == j) return i == 0 ? m11 : (i == 1 ? m22 : m33);
  if (i == 0) return j == 1 ? m12 : m13;
  return m23;
}

TernaryForm standard_form() { return {0.0, 1.0, 0.0, 0.0, -1.0, 0.0}; }

TernaryForm scaled(const TernaryForm& f, double c) {
  return {c * f.m11, c * f.m22, c * f.m33, c * f.m12, c * f.m13, c * f.m23};
}

TernaryForm congruent(const TernaryForm& form, const Eigen::Matrix3d& g) {
  return TernaryForm::from_gram(g.transpose() * form.gram() * g);
}

double evaluate(const TernaryForm& f, const Vec3& v) {
  const auto [x, y, z] = v;
  return f.m11 * x * x + f.m22 * y * y + f.m33 * z * z +
         2.0 * (f.m12 * x * y + f.m13 * x * z + f.m23 * y * z);
}

double evaluate(const TernaryForm& f, const IntVec3& v) {
  return evaluate(f, Vec3{static_cast<double>(v[0]), static_cast<double>(v[1]),
                          static_cast<double>(v[2])});
}

double determinant(const TernaryForm& f) {
  return f.m11 * (f.m22 * f.m33 - f.m23 * f.m23) -
         f.m12 * (f.m12 * f.m33 - f.m23 * f.m13) +
         f.m13 * (f.m12 * f.m23 - f.m22 * f.m13);
}

Signature signature(const TernaryForm& form) {
  if (std::abs(determinant(form)) < kDegeneracyTolerance) {
    throw DegenerateForm("signature: form is degenerate");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(
      form.gram(), Eigen::EigenvaluesOnly);
  Signature sig;
  for (double lambda : solver.eigenvalues()) {
    (lambda > 0.0 ? sig.positive : sig.negative) += 1;
  }
  return sig;
}

Vec3 gradient(const TernaryForm& f, const Vec3& v) {
  const auto [x, y, z] = v;
  return {2.0 * (f.m11 * x + f.m12 * y + f.m13 * z),
          2.0 * (f.m12 * x + f.m22 * y + f.m23 * z),
          2.0 * (f.m13 * x + f.m23 * y + f.m33 * z)};
}

double sup_norm(const TernaryForm& f) {
  return std::max({std::abs(f.m11), std::abs(f.m22), std::abs(f.m33),
                   std::abs(f.m12), std::abs(f.m13), std::abs(f.m23)});
}

Normalization normalize(const TernaryForm& form) {
  const double det = determinant(form);
  if (std::abs(det) < kDegeneracyTolerance) {
    throw DegenerateForm("normalize: |det Q| below tolerance");
  }
  const Signature sig = signature(form);
  if (sig.positive == 0 || sig.negative == 0) {
    throw DefiniteForm("normalize: form is definite");
  }
  // For a ternary indefinite form det > 0 exactly when the signature is (1,2).
  if (std::abs(det - 1.0) <= kUnitDeterminantTolerance) {
    return {NormalizedForm(form, det), 1.0, 1};
  }
  const double scale = std::cbrt(1.0 / std::abs(det));
  const int sign = det > 0.0 ? 1 : -1;
  const TernaryForm result = scaled(form, sign * scale);
  return {NormalizedForm(result, determinant(result)), scale, sign};
}

}  // namespace opplab
