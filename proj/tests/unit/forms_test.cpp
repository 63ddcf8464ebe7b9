#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "opplab/errors.hpp"
#include "opplab/forms.hpp"
#include "oracles.hpp"

namespace opplab {
namespace {

oracle::Gram to_oracle(const TernaryForm& f) {
  return oracle::gram(f.m11, f.m22, f.m33, f.m12, f.m13, f.m23);
}

TernaryForm random_form(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  return {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
}

TEST(Forms, EvaluateExamples) {
  const TernaryForm sqf = standard_form();
  EXPECT_EQ(evaluate(sqf, Vec3{1, 0, 0}), 0.0);
  EXPECT_EQ(evaluate(sqf, Vec3{0, 1, 0}), 1.0);
  EXPECT_EQ(evaluate(sqf, Vec3{1, 1, 1}), -1.0);
  EXPECT_EQ(evaluate(sqf, IntVec3{1, 1, 1}), -1.0);
}

TEST(Forms, EvaluateReproducesGram) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 100; ++n) {
    const TernaryForm f = random_form(rng);
    for (int i = 0; i < 3; ++i) {
      Vec3 ei{};
      ei[i] = 1.0;
      EXPECT_DOUBLE_EQ(evaluate(f, ei), f.entry(i, i));
      for (int j = i + 1; j < 3; ++j) {
        Vec3 eij{};
        eij[i] = eij[j] = 1.0;
        EXPECT_NEAR(evaluate(f, eij) - f.entry(i, i) - f.entry(j, j), 2 * f.entry(i, j), 1e-12);
      }
    }
  }
}

TEST(Forms, DeterminantExamples) {
  EXPECT_EQ(determinant(TernaryForm::diagonal(1, -1, -1)), 1.0);
  EXPECT_EQ(determinant(TernaryForm::diagonal(2, 2, -2)), -8.0);
  EXPECT_EQ(determinant(standard_form()), -1.0);
  EXPECT_EQ(oracle::det3(to_oracle(standard_form())), -1.0);
}

TEST(Forms, DeterminantMatchesOracle) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 1000; ++n) {
    const TernaryForm f = random_form(rng);
    EXPECT_NEAR(determinant(f), oracle::det3(to_oracle(f)), 1e-12);
  }
}

TEST(Forms, SignatureExamples) {
  EXPECT_EQ(signature(TernaryForm::diagonal(1, 1, -1)), (Signature{2, 1}));
  EXPECT_EQ(signature(standard_form()), (Signature{2, 1}));
  EXPECT_EQ(signature(TernaryForm::diagonal(1, 1, 1)), (Signature{3, 0}));
  const auto [p, n] = oracle::charpoly_signature(to_oracle(standard_form()));
  EXPECT_EQ(p, 2);
  EXPECT_EQ(n, 1);
  EXPECT_THROW(signature(TernaryForm::diagonal(1, 1, 0)), DegenerateForm);
}

TEST(Forms, SignatureMatchesCharacteristicPolynomial) {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 2000; ++n) {
    const TernaryForm f = random_form(rng);
    if (std::abs(determinant(f)) < 1e-3) continue;
    const auto [p, q] = oracle::charpoly_signature(to_oracle(f));
    EXPECT_EQ(signature(f), (Signature{p, q}));
  }
}

TEST(Forms, NormalizeExamples) {
  {
    const Normalization n = normalize(TernaryForm::diagonal(1, -1, -1));
    EXPECT_EQ(n.form.form(), TernaryForm::diagonal(1, -1, -1));
    EXPECT_EQ(n.scale, 1.0);
  }
  {
    const Normalization n = normalize(TernaryForm::diagonal(1, 1, -1));
    EXPECT_EQ(n.form.form(), TernaryForm::diagonal(-1, -1, 1));
    EXPECT_EQ(n.scale, 1.0);
    EXPECT_EQ(n.sign, -1);
  }
  {
    const Normalization n = normalize(TernaryForm::diagonal(2, -2, -2));
    const TernaryForm f = n.form.form();
    EXPECT_NEAR(f.m11, 1.0, 1e-15);
    EXPECT_NEAR(f.m22, -1.0, 1e-15);
    EXPECT_NEAR(f.m33, -1.0, 1e-15);
    EXPECT_NEAR(n.scale, 0.5, 1e-15);
  }
  EXPECT_THROW(normalize(TernaryForm::diagonal(1, 1, 1e-12)), DegenerateForm);
  EXPECT_THROW(normalize(TernaryForm::diagonal(1, 2, 3)), DefiniteForm);
  EXPECT_THROW(normalize(TernaryForm::diagonal(-1, -2, -3)), DefiniteForm);
}

TEST(Forms, GradientAndSupNorm) {
  const Vec3 g = gradient(standard_form(), Vec3{0, 1, 0});
  EXPECT_EQ(g, (Vec3{0, 2, 0}));
  EXPECT_EQ(gradient(TernaryForm::diagonal(3, -1, 2), Vec3{0, 0, 0}), (Vec3{0, 0, 0}));
  EXPECT_EQ(gradient(TernaryForm::diagonal(1, -1, -1), Vec3{1, 1, 1}), (Vec3{2, -2, -2}));
  EXPECT_EQ(sup_norm(standard_form()), 1.0);
  EXPECT_EQ(sup_norm(TernaryForm::diagonal(2, -1, -1)), 2.0);
  EXPECT_EQ(sup_norm(TernaryForm{}), 0.0);
}

TEST(FormsProperty, EvaluateIsGramSum) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int n = 0; n < 100000; ++n) {
    const TernaryForm f = random_form(rng);
    const Vec3 v{u(rng), u(rng), u(rng)};
    double expected = 0.0;
    double scale = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        expected += f.entry(i, j) * v[i] * v[j];
        scale += std::abs(f.entry(i, j) * v[i] * v[j]);
      }
    }
    ASSERT_NEAR(evaluate(f, v), expected, 1e-12 * std::max(1.0, scale));
  }
}

TEST(FormsProperty, NormalizeIsIdempotentWithUnitDeterminant) {
  std::mt19937_64 rng(19);
  int checked = 0;
  while (checked < 2000) {
    const TernaryForm f = random_form(rng);
    if (std::abs(determinant(f)) < 1e-2) continue;
    const Signature s = signature(f);
    if (s.positive == 0 || s.negative == 0) continue;
    ++checked;
    const Normalization n = normalize(f);
    ASSERT_NEAR(determinant(n.form.form()), 1.0, 1e-10);
    ASSERT_EQ(n.form.signature(), (Signature{1, 2}));
    ASSERT_EQ(signature(n.form.form()), (Signature{1, 2}));
    const Normalization again = normalize(n.form.form());
    ASSERT_EQ(again.form.form(), n.form.form());
    ASSERT_EQ(again.scale, 1.0);
  }
}

TEST(FormsProperty, SylvesterLaw) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 2000; ++n) {
    const TernaryForm f = random_form(rng);
    if (std::abs(determinant(f)) < 1e-2) continue;
    Eigen::Matrix3d g;
    for (int i = 0; i < 9; ++i) g(i / 3, i % 3) = u(rng);
    if (std::abs(g.determinant()) < 0.1) continue;
    const TernaryForm h = congruent(f, g);
    if (std::abs(determinant(h)) < 1e-6) continue;
    ASSERT_EQ(signature(h), signature(f));
  }
}

}  // namespace
}  // namespace opplab
