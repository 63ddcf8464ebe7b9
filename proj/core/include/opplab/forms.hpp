#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace opplab {

using Vec3 = std::array<double, 3>;
using IntVec3 = std::array<std::int64_t, 3>;

// Real symmetric ternary quadratic form Q(v) = vᵀMv, stored as the six
// entries of the Gram matrix M. Cross entries are whole entries of M, so the
// coefficient of x₁x₂ in Q is 2·m12.
struct TernaryForm {
  double m11 = 0.0;
  double m22 = 0.0;
  double m33 = 0.0;
  double m12 = 0.0;
  double m13 = 0.0;
  double m23 = 0.0;

  static TernaryForm diagonal(double d1, double d2, double d3) {
    return {d1, d2, d3, 0.0, 0.0, 0.0};
  }
  static TernaryForm from_gram(const Eigen::Matrix3d& gram);

  Eigen::Matrix3d gram() const;
  // Entry (i, j) of M, zero-based.
  double entry(int i, int j) const;

  friend bool operator==(const TernaryForm&, const TernaryForm&) = default;
};

// -2x₁x₃ + x₂², the reference form whose special orthogonal group is H.
TernaryForm standard_form();

TernaryForm scaled(const TernaryForm& form, double factor);

// Q ↦ gᵀQg, i.e. v ↦ Q(gv).
TernaryForm congruent(const TernaryForm& form, const Eigen::Matrix3d& g);

struct Signature {
  int positive = 0;
  int negative = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

inline constexpr double kDegeneracyTolerance = 1e-10;
inline constexpr double kUnitDeterminantTolerance = 1e-12;

double evaluate(const TernaryForm& form, const Vec3& v);
double evaluate(const TernaryForm& form, const IntVec3& v);
double determinant(const TernaryForm& form);
// Throws DegenerateForm when |det| < kDegeneracyTolerance.
Signature signature(const TernaryForm& form);
Vec3 gradient(const TernaryForm& form, const Vec3& v);
// Largest absolute Gram entry; the form norm used throughout the library.
double sup_norm(const TernaryForm& form);

// An indefinite form with det = +1 and signature (1,2). Only normalize()
// constructs one, so holding a NormalizedForm is proof of the invariants.
class NormalizedForm {
 public:
  const TernaryForm& form() const { return form_; }
  double determinant() const { return determinant_; }
  Signature signature() const { return {1, 2}; }

 private:
  friend struct Normalization normalize(const TernaryForm& form);
  NormalizedForm(const TernaryForm& form, double det) : form_(form), determinant_(det) {}

  TernaryForm form_;
  double determinant_;
};

struct Normalization {
  NormalizedForm form;
  // c = |det Q|^{-1/3}; the normalized form is ±c·Q.
  double scale;
  // +1 or -1: the sign applied so that det becomes +1.
  int sign;
};

// Scales by |det Q|^{-1/3} and flips the sign when needed so the result has
// det 1 and signature (1,2). A form that already satisfies both comes back
// unchanged with scale exactly 1.
// Throws DegenerateForm (|det| < 1e-10) or DefiniteForm.
Normalization normalize(const TernaryForm& form);

}  // namespace opplab
