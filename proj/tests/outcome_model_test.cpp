#include "lostchance/outcome_model.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace lostchance {
namespace {

CaseModel prize_model() {
  CaseModel m;
  m.space = {{"a1", "a2", "a3", "a4", "a5"}, {5, 30, 35, 70, 110}};
  m.counterfactual = DiscreteDistribution::uniform(5);
  m.factual = {{0.2, 0.2, 0.4, 0.2, 0.0}};
  return m;
}

TEST(UtilityValue, LinearCaseIsMoneyMinusOne) {
  EXPECT_EQ(utility_value({0.0}, 100.0), 99.0);
}

TEST(UtilityValue, LogLimitAtThetaOne) {
  EXPECT_NEAR(utility_value({1.0}, std::exp(1.0)), 1.0, 1e-15);
}

TEST(UtilityValue, SquareRootCurve) {
  // (1 - sqrt(10000)) / (0.5 - 1) = 198
  EXPECT_NEAR(utility_value({0.5}, 10000.0), 198.0, 1e-11);
}

TEST(UtilityValue, RejectsBadArguments) {
  EXPECT_THROW(utility_value({0.5}, 0.0), std::domain_error);
  EXPECT_THROW(utility_value({0.5}, -3.0), std::domain_error);
  EXPECT_THROW(utility_value({1.5}, 10.0), std::domain_error);
  EXPECT_THROW(utility_value({-0.1}, 10.0), std::domain_error);
}

TEST(MoneyEquivalent, InvertsKnownPoints) {
  EXPECT_EQ(money_equivalent({0.0}, 99.0), 100.0);
  EXPECT_EQ(money_equivalent({1.0}, 0.0), 1.0);
  EXPECT_NEAR(money_equivalent({0.5}, 198.0), 10000.0, 1e-8);
}

TEST(MoneyEquivalent, RejectsValuesOutsideRange) {
  // range of the theta = 0.5 curve is (-2, inf)
  EXPECT_THROW(money_equivalent({0.5}, -2.0), std::domain_error);
  EXPECT_THROW(money_equivalent({0.0}, -1.0), std::domain_error);
  EXPECT_NO_THROW(money_equivalent({1.0}, -50.0));
}

TEST(UtilityCurveProperty, IncreasingAndInvertibleOnGrid) {
  for (int t = 0; t <= 20; ++t) {
    const UtilityCurve curve{t / 20.0};
    double previous = -INFINITY;
    for (double m = 1.0; m <= 1e7; m *= 10.0) {
      const double v = utility_value(curve, m);
      EXPECT_GT(v, previous) << "theta=" << curve.theta << " m=" << m;
      previous = v;
      const double back = money_equivalent(curve, v);
      EXPECT_LE(std::abs(back - m), 1e-10 * m) << "theta=" << curve.theta << " m=" << m;
    }
  }
}

TEST(UtilityCurveProperty, ContinuousAtLogLimit) {
  // V_theta(m) - log(m) ~ (1 - theta) log(m)^2 / 2, which stays under 1e-4
  // for theta = 0.999999 while log(m)^2 < 200, i.e. m up to about 1.3e6.
  const UtilityCurve near_log{0.999999};
  for (double m = 1.0; m <= 1e6; m *= 10.0)
    EXPECT_LT(std::abs(utility_value(near_log, m) - std::log(m)), 1e-4) << "m=" << m;
  // Beyond that the gap follows the second-order term.
  for (double m = 1.0; m <= 1e7; m *= 10.0) {
    const double l = std::log(m);
    EXPECT_LE(std::abs(utility_value(near_log, m) - l), 1e-6 * l * l / 2.0 * 1.01 + 1e-15);
  }
  // Inside the log branch the curve is exactly the log.
  EXPECT_EQ(utility_value({1.0 - 1e-10}, 1e7), std::log(1e7));
}

TEST(AwardFromCompensation, IdentityMapReturnsCompensation) {
  EXPECT_EQ(award_from_compensation(MoneyMap::identity(), 35.0, 37.5), 37.5);
  for (double v1 : {-10.0, 0.0, 35.0, 1e6})
    for (double x : {0.0, 0.25, 15.0, 1234.5})
      EXPECT_NEAR(award_from_compensation(MoneyMap::identity(), v1, x), x, 1e-9 * (1 + std::abs(v1)));
}

TEST(AwardFromCompensation, ZeroCompensationIsZeroAward) {
  EXPECT_EQ(award_from_compensation(MoneyMap::inverse_of({0.3}), 12.0, 0.0), 0.0);
}

TEST(AwardFromCompensation, LogCurve) {
  // exp(log(500000) + log(1.25)) - 500000
  const double award =
      award_from_compensation(MoneyMap::inverse_of({1.0}), std::log(500000.0), std::log(1.25));
  EXPECT_NEAR(award, 125000.0, 1e-6);
}

TEST(AwardFromCompensation, NegativeCompensationIsAContractViolation) {
  EXPECT_THROW(award_from_compensation(MoneyMap::identity(), 1.0, -0.5), std::invalid_argument);
}

TEST(MoneyMapTabulated, InterpolatesBothWays) {
  const auto map = MoneyMap::tabulated({{0.0, 10.0}, {1.0, 20.0}, {3.0, 100.0}});
  EXPECT_DOUBLE_EQ(map.money(0.5), 15.0);
  EXPECT_DOUBLE_EQ(map.money(2.0), 60.0);
  EXPECT_DOUBLE_EQ(map.value(60.0), 2.0);
  EXPECT_THROW(map.money(3.5), std::domain_error);
  EXPECT_THROW(MoneyMap::tabulated({{0.0, 1.0}, {1.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(MoneyMap::tabulated({{0.0, 1.0}}), std::invalid_argument);
}

TEST(ValidateCase, PrizeModelIsValid) { EXPECT_NO_THROW(validate_case(prize_model())); }

TEST(ValidateCase, BrokenNormalizationIsReported) {
  auto m = prize_model();
  m.counterfactual = {{0.2, 0.2, 0.2, 0.2, 0.19}};
  try {
    validate_case(m);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_NE(e.issues()[0].find("normalization"), std::string::npos);
  }
}

TEST(ValidateCase, ObservedOutcomeNeedsFactualMass) {
  auto m = prize_model();
  m.factual_observed = 4;  // a5 never occurs in the factual scenario
  EXPECT_THROW(validate_case(m), ValidationError);
  m.factual_observed = 2;
  EXPECT_NO_THROW(validate_case(m));
}

TEST(ValidateCase, ListsEveryViolation) {
  auto m = prize_model();
  m.space.labels[1] = "a1";
  m.factual = {{0.5, 0.5, -0.1, 0.1, 0.0}};
  m.factual_observed = 4;
  try {
    validate_case(m);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_GE(e.issues().size(), 3u);  // duplicate label, negative weight, observed a5
  }
}

}  // namespace
}  // namespace lostchance

namespace lostchance {
namespace {

TEST(MoneyMapAnchors, ExactAtStatedAmounts) {
  const auto plain = MoneyMap::inverse_of({0.37});
  const auto m = plain.anchored_at({300.0, 1e6, 300.0});
  ASSERT_EQ(m.anchors().size(), 2u);
  EXPECT_EQ(m.anchors().front().money, 300.0);
  for (double x : {300.0, 1e6}) {
    EXPECT_EQ(m.value(x), plain.value(x));
    EXPECT_EQ(m.money(m.value(x)), x);
  }
  EXPECT_EQ(m.money(5.0), plain.money(5.0));
  EXPECT_NE(m, plain);
  EXPECT_EQ(m, plain.anchored_at({1e6, 300.0}));
  EXPECT_THROW(plain.anchored_at({0.0}), std::domain_error);
}

}  // namespace
}  // namespace lostchance
