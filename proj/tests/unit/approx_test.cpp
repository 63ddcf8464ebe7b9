#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "opplab/approx.hpp"
#include "opplab/errors.hpp"
#include "oracles.hpp"

namespace opplab {
namespace {

std::array<double, 6> entries(const TernaryForm& f) {
  return {f.m11, f.m22, f.m33, f.m12, f.m13, f.m23};
}

NormalizedForm sqrt2_form() {
  return normalize(TernaryForm::diagonal(1, -1, -std::numbers::sqrt2)).form;
}

NormalizedForm golden_form() {
  return normalize(TernaryForm::diagonal(1, -1, -std::numbers::phi)).form;
}

NormalizedForm random_normalized(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    const TernaryForm f{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
    if (std::abs(determinant(f)) < 0.1) continue;
    const Signature s = signature(f);
    if (s.positive > 0 && s.negative > 0) return normalize(f).form;
  }
}

TEST(IntegralForm, DeterminantAndScale) {
  EXPECT_EQ(IntegralForm::diagonal(1, -1, -1).determinant(), 1);
  EXPECT_EQ((IntegralForm{{0, 1, 0, 0, -1, 0}}).determinant(), -1);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> u(-50, 50);
  for (int n = 0; n < 1000; ++n) {
    IntegralForm q;
    for (auto& e : q.entries) e = u(rng);
    EXPECT_EQ(q.determinant(), oracle::det3(q.entries));
  }
  EXPECT_EQ(integral_scale(8), 0.5);
  EXPECT_EQ(integral_scale(-8), -0.5);
}

TEST(BestRationalApprox, ExactForm) {
  const auto r = best_rational_approx(normalize(TernaryForm::diagonal(1, -1, -1)).form, 1);
  EXPECT_EQ(r.q_prime, IntegralForm::diagonal(1, -1, -1));
  EXPECT_EQ(r.lambda, 1.0);
  EXPECT_EQ(r.dist, 0.0);
  EXPECT_TRUE(r.certified);
}

TEST(BestRationalApprox, NearlyRationalForm) {
  const auto q = normalize(TernaryForm::diagonal(1, -1, -(1 + 1e-6))).form;
  const auto r = best_rational_approx(q, 2);
  EXPECT_EQ(r.q_prime, IntegralForm::diagonal(1, -1, -1));
  EXPECT_LE(r.dist, 1e-5);
}

TEST(BestRationalApprox, Sqrt2FormIsFarFromRational) {
  const auto q = sqrt2_form();
  const auto r = best_rational_approx(q, 10);
  EXPECT_GE(r.dist, 1e-3);
  EXPECT_TRUE(r.certified);
  EXPECT_EQ(r.dist, oracle::best_approx_dist(entries(q.form()), 10));
}

TEST(BestRationalApprox, ResultInvariants) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 10; ++n) {
    const auto q = random_normalized(rng);
    const auto r = best_rational_approx(q, 5);
    EXPECT_LE(r.q_prime.sup_norm(), 5);
    EXPECT_NE(r.q_prime.determinant(), 0);
    EXPECT_EQ(r.lambda, integral_scale(r.q_prime.determinant()));
    EXPECT_EQ(r.dist, scaled_distance(q.form(), r.q_prime));
    EXPECT_EQ(r.R, 5.0);
  }
}

TEST(BestRationalApprox, Preconditions) {
  EXPECT_THROW(best_rational_approx(sqrt2_form(), 0.5), InvalidArgument);
}

TEST(BestRationalApproxProperty, ExhaustiveOracleEquality) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 12; ++n) {
    const auto q = random_normalized(rng);
    const std::int64_t R = 1 + n % 4;
    EXPECT_EQ(best_rational_approx(q, static_cast<double>(R)).dist,
              oracle::best_approx_dist(entries(q.form()), R))
        << n;
  }
}

TEST(BestRationalApproxProperty, SignSymmetry) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 200; ++n) {
    const auto q = random_normalized(rng);
    IntegralForm p;
    std::uniform_int_distribution<std::int64_t> u(-6, 6);
    for (auto& e : p.entries) e = u(rng);
    if (p.determinant() == 0) continue;
    IntegralForm minus = p;
    for (auto& e : minus.entries) e = -e;
    EXPECT_EQ(scaled_distance(q.form(), p), scaled_distance(q.form(), minus));
  }
}

TEST(BestRationalApproxProperty, NonIncreasingInR) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 4; ++n) {
    const auto q = random_normalized(rng);
    double prev = INFINITY;
    for (double R : {1.0, 2.0, 3.0, 5.0, 8.0}) {
      const double d = best_rational_approx(q, R).dist;
      EXPECT_LE(d, prev);
      prev = d;
    }
  }
}

TEST(BestRationalApprox, LargeHeightIsCertifiedAndNoWorseThanLattice) {
  const auto q = golden_form();
  const auto r = best_rational_approx(q, 40);
  EXPECT_LE(r.dist, best_rational_approx(q, 12).dist);
  for (const IntegralForm& c : lattice_candidates(q.form(), 40)) {
    if (c.determinant() != 0 && c.sup_norm() <= 40) EXPECT_LE(r.dist, scaled_distance(q.form(), c));
  }
}

TEST(Dichotomy, RationalForm) {
  const auto q = normalize(TernaryForm::diagonal(1, -1, -1)).form;
  for (double R : {2.0, 3.0}) {
    const auto out = dichotomy_report(q, R, std::pow(R, 4));
    ASSERT_TRUE(out.is_rational());
    EXPECT_LE(std::get<ApproxResult>(out.branch).dist, 1e-12);
  }
}

TEST(Dichotomy, Sqrt2FormSmallValues) {
  DichotomyOptions opts;
  opts.a_exp = 0.25;
  const auto out = dichotomy_report(sqrt2_form(), 10, 1e4, opts);
  ASSERT_FALSE(out.is_rational());
  const auto& small = std::get<SmallValuesOutcome>(out.branch);
  EXPECT_EQ(small.witnessed_fraction, 1.0);
  EXPECT_EQ(small.witnessed, small.targets);
  EXPECT_GT(small.approx_dist, out.thresholds.dist_threshold);
  EXPECT_NEAR(out.thresholds.s_bound, std::pow(10.0, 0.125), 1e-15);
  EXPECT_NEAR(out.thresholds.eps, std::pow(10.0, -0.125), 1e-15);
  const auto m = oracle::gram(sqrt2_form().form().m11, sqrt2_form().form().m22,
                              sqrt2_form().form().m33, 0, 0, 0);
  for (const WitnessRow& row : small.table.rows) {
    ASSERT_TRUE(row.witness);
    EXPECT_EQ(*oracle::witness(m, row.target, out.thresholds.eps, std::ceil(row.witness->norm)),
              row.witness->v);
  }
}

TEST(Dichotomy, DegenerateGridHasSingleTarget) {
  DichotomyOptions opts;
  opts.a_exp = 0.25;
  opts.grid_step = 2.0;
  const auto out = dichotomy_report(sqrt2_form(), 10, 1e4, opts);
  ASSERT_FALSE(out.is_rational());
  const auto& small = std::get<SmallValuesOutcome>(out.branch);
  ASSERT_EQ(small.table.rows.size(), 1u);
  EXPECT_EQ(small.table.rows[0].target, 0.0);
}

TEST(Dichotomy, Preconditions) {
  EXPECT_THROW(dichotomy_report(sqrt2_form(), 10, 100), InvalidArgument);
}

TEST(DichotomyProperty, Deterministic) {
  DichotomyOptions opts;
  opts.a_exp = 0.5;
  const auto a = dichotomy_report(golden_form(), 6, 1e3, opts);
  const auto b = dichotomy_report(golden_form(), 6, 1e3, opts);
  EXPECT_EQ(a.is_rational(), b.is_rational());
  EXPECT_EQ(a.thresholds.dist_threshold, b.thresholds.dist_threshold);
}

TEST(AlgebraicityGap, RationalFormIsZero) {
  const std::vector<double> Rs{1, 2, 4};
  const auto t = algebraicity_gap(normalize(TernaryForm::diagonal(1, -1, -1)).form, Rs);
  for (const GapRow& row : t.rows) EXPECT_EQ(row.approx.dist, 0.0);
  EXPECT_FALSE(t.fit);
}

TEST(AlgebraicityGap, GoldenRatioFit) {
  const std::vector<double> Rs{1, 2, 3, 5, 8, 13};
  const auto t = algebraicity_gap(golden_form(), Rs);
  ASSERT_EQ(t.rows.size(), Rs.size());
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_LE(t.rows[i].approx.dist, t.rows[i - 1].approx.dist);
  }
  ASSERT_TRUE(t.fit);
  EXPECT_GT(t.fit->c, 0.0);
  for (const GapRow& row : t.rows) {
    EXPECT_GT(row.approx.dist, 0.0);
    EXPECT_EQ(row.approx.dist, oracle::best_approx_dist(entries(golden_form().form()),
                                                        static_cast<std::int64_t>(row.R)))
        << row.R;
    if (row.R >= 5) break;
  }
}

TEST(AlgebraicityGap, SingleEntryMatchesBestApprox) {
  const std::vector<double> Rs{4};
  const auto t = algebraicity_gap(golden_form(), Rs);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].approx.dist, best_rational_approx(golden_form(), 4).dist);
  EXPECT_EQ(t.rows[0].approx.q_prime, best_rational_approx(golden_form(), 4).q_prime);
}

}  // namespace
}  // namespace opplab
