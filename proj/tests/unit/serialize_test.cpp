#include <cmath>

#include <gtest/gtest.h>

#include "opplab/errors.hpp"
#include "opplab/serialize.hpp"

namespace opplab {
namespace {

TEST(Serialize, FormRoundTrip) {
  const TernaryForm f{1.5, -2, 0.25, 0.1, -0.3, 7};
  const json j = f;
  EXPECT_EQ(j.at("m23"), 7.0);
  EXPECT_EQ(j.get<TernaryForm>(), f);
}

TEST(Serialize, FormShorthands) {
  EXPECT_EQ(json::parse("[1, -1, -2]").get<TernaryForm>(), TernaryForm::diagonal(1, -1, -2));
  EXPECT_EQ(json::parse("\"sqf\"").get<TernaryForm>(), standard_form());
  EXPECT_EQ(json::parse(R"({"m11":1,"m22":-1,"m33":-1})").get<TernaryForm>(),
            TernaryForm::diagonal(1, -1, -1));
  EXPECT_THROW(json::parse("[1, 2]").get<TernaryForm>(), InvalidArgument);
  EXPECT_THROW(json::parse(R"({"m11":1,"m22":-1})").get<TernaryForm>(), InvalidArgument);
  EXPECT_THROW(json::parse(R"({"m11":1,"m22":-1,"m33":1,"x":0})").get<TernaryForm>(),
               InvalidArgument);
  EXPECT_THROW(json::parse("\"other\"").get<TernaryForm>(), InvalidArgument);
}

TEST(Serialize, DichotomyBranchTag) {
  DichotomyOutcome rational{{}, ApproxResult{IntegralForm::diagonal(1, -1, -1), 1, 0, 2, true}};
  const json a = rational;
  EXPECT_EQ(a.at("branch"), "rational_approx");
  EXPECT_EQ(a.at("rational_approx").at("q_prime"), json::parse("[1,-1,-1,0,0,0]"));
  EXPECT_TRUE(a.at("thresholds").contains("a_exp"));
  DichotomyOutcome small{{}, SmallValuesOutcome{}};
  EXPECT_EQ(json(small).at("branch"), "small_values");
}

TEST(Serialize, FiniteConfig) {
  const auto c = json::parse(R"({"points": [[0,0,0,0,0.5],[0.1,0,0,0,0]], "weights": [0.5,0.5]})")
                     .get<FiniteConfig>();
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[0][4], 0.5);
  EXPECT_EQ(c.weights.size(), 2u);
  const auto bare = json::parse("[[0,0,0,0,0]]").get<FiniteConfig>();
  EXPECT_EQ(bare.size(), 1u);
  EXPECT_TRUE(bare.weights.empty());
  EXPECT_EQ(json(c).get<FiniteConfig>().points, c.points);
  EXPECT_THROW(json::parse("[[0,0,0]]").get<FiniteConfig>(), InvalidArgument);
}

TEST(Serialize, LatticeBasisRowMajor) {
  const LatticePoint x(flow_u(2.0).matrix());
  const json j = lattice_to_json(x);
  ASSERT_EQ(j.size(), 9u);
  EXPECT_EQ(j[1], 2.0);
  EXPECT_EQ(j[3], 0.0);
  EXPECT_EQ(lattice_from_json(j).basis(), x.basis());
  EXPECT_THROW(lattice_from_json(json::parse("[2,0,0,0,1,0,0,0,1]")), InvalidArgument);
}

TEST(Serialize, CountReportNaNBecomesNull) {
  CountReport r;
  r.ratio = std::nan("");
  r.degenerate_window = true;
  const json j = r;
  EXPECT_TRUE(j.at("ratio").is_null());
  EXPECT_TRUE(j.at("degenerate").get<bool>());
}

}  // namespace
}  // namespace opplab
