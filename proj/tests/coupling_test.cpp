#include "lostchance/coupling.hpp"

#include <random>
#include <sstream>

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

CaseModel two_outcome(double p0, double p1, double dv) {
  CaseModel m;
  m.space = {{"bad", "good"}, {0.0, dv}};
  m.counterfactual = {{1 - p0, p0}};
  m.factual = {{1 - p1, p1}};
  return m;
}

CaseModel random_model(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> w(0, 6);
  std::uniform_int_distribution<int> v(0, 40);
  const auto draw = [&] {
    std::vector<double> x(n);
    double s = 0;
    for (auto& e : x) s += (e = w(rng));
    if (s == 0) x[0] = s = 1;
    for (auto& e : x) e /= s;
    return DiscreteDistribution{x};
  };
  CaseModel m;
  for (std::size_t i = 0; i < n; ++i) {
    m.space.labels.push_back("o" + std::to_string(i));
    m.space.values.push_back(v(rng));
  }
  m.counterfactual = draw();
  m.factual = draw();
  return m;
}

void expect_marginals(const CaseModel& m, const Coupling& c) {
  const auto rows = c.counterfactual_marginal();
  const auto cols = c.factual_marginal();
  for (std::size_t i = 0; i < m.space.size(); ++i) {
    EXPECT_NEAR(rows[i], m.counterfactual[i], 1e-10);
    EXPECT_NEAR(cols[i], m.factual[i], 1e-10);
  }
}

TEST(EvidenceCoupling, DeterministicPrizeMap) {
  const auto m = prize_model();
  // a1->a3, a2->a3, a3->a2, a4->a1, a5->a4
  const auto c = evidence_coupling(m, joint_from_map(m, {2, 2, 1, 0, 3}));
  const auto cols = c.factual_marginal();
  EXPECT_NEAR(cols[0], 0.2, 1e-15);
  EXPECT_NEAR(cols[1], 0.2, 1e-15);
  EXPECT_NEAR(cols[2], 0.4, 1e-15);
  EXPECT_NEAR(cols[3], 0.2, 1e-15);
  EXPECT_EQ(cols[4], 0.0);
}

TEST(EvidenceCoupling, DiagonalOnIdenticalMarginals) {
  auto m = prize_model();
  m.factual = m.counterfactual;
  EXPECT_NO_THROW(evidence_coupling(m, joint_from_map(m, {0, 1, 2, 3, 4})));
}

TEST(EvidenceCoupling, ThresholdConstruction) {
  // F ~ U(0,1), good iff F < p: (good, good) = p1, (good, bad) = p0 - p1, (bad, bad) = 1 - p0
  const auto m = two_outcome(0.95, 0.90, 1.0);
  const auto c = evidence_coupling(m, Matrix::from_rows({{0.05, 0.0}, {0.05, 0.90}}));
  EXPECT_NEAR(c(1, 1), 0.90, 1e-15);
  EXPECT_NEAR(c(1, 0), 0.05, 1e-15);
  EXPECT_NEAR(c(0, 0), 0.05, 1e-15);
}

TEST(EvidenceCoupling, MarginalMismatchNamesTheIndex) {
  const auto m = two_outcome(0.95, 0.90, 1.0);
  try {
    evidence_coupling(m, Matrix::from_rows({{0.10, 0.0}, {0.0, 0.90}}));
    FAIL() << "expected rejection";
  } catch (const ValidationError& e) {
    bool row0 = false;
    for (const auto& s : e.issues()) row0 = row0 || s.find("row 0") != std::string::npos;
    EXPECT_TRUE(row0) << e.what();
  }
  EXPECT_THROW(evidence_coupling(m, Matrix(3, 3)), ValidationError);
}

TEST(IndependenceCoupling, OuterProduct) {
  const auto two = two_outcome(0.95, 0.90, 1.0);
  EXPECT_NEAR(independence_coupling(two)(1, 1), 0.95 * 0.90, 1e-15);

  const auto prize = prize_model();
  EXPECT_NEAR(independence_coupling(prize)(4, 2), 0.08, 1e-15);

  auto point = prize_model();
  point.factual = DiscreteDistribution::point_mass(5, 3);
  const auto c = independence_coupling(point);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(c(i, 3), point.counterfactual[i]);
}

TEST(LeastDivergenceCoupling, IdenticalMarginalsAreDiagonal) {
  auto m = prize_model();
  m.factual = m.counterfactual;
  const auto c = least_divergence_coupling(m);
  EXPECT_EQ(transport_cost(c), 0.0);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(c(i, i), 0.2, 1e-15);
}

TEST(LeastDivergenceCoupling, TwoOutcomeMatchesThreshold) {
  const double dv = 100000.0;
  const auto m = two_outcome(0.95, 0.90, dv);
  const auto c = least_divergence_coupling(m);
  EXPECT_NEAR(c(1, 1), 0.90, 1e-12);
  EXPECT_NEAR(c(1, 0), 0.05, 1e-12);
  EXPECT_NEAR(c(0, 0), 0.05, 1e-12);
  EXPECT_NEAR(transport_cost(c), 0.05 * dv * dv, 1e-6);
}

TEST(LeastDivergenceCoupling, PrizeCaseIsComonotone) {
  const auto c = least_divergence_coupling(prize_model());
  // (5,5) (30,30) (35,35) (70,35) (110,70), mass 0.2 each
  EXPECT_NEAR(c(0, 0), 0.2, 1e-15);
  EXPECT_NEAR(c(1, 1), 0.2, 1e-15);
  EXPECT_NEAR(c(2, 2), 0.2, 1e-15);
  EXPECT_NEAR(c(3, 2), 0.2, 1e-15);
  EXPECT_NEAR(c(4, 3), 0.2, 1e-15);
  EXPECT_NEAR(transport_cost(c), 565.0, 1e-9);
}

TEST(TransportCost, PublishedPrizeRow) {
  const auto m = prize_model();
  // a1->a1, a2->a2, a3->a3, a4->a4, a5->a3: only (110, 35) moves, 0.2 * 75^2
  const auto c = evidence_coupling(m, joint_from_map(m, {0, 1, 2, 3, 2}));
  EXPECT_NEAR(transport_cost(c), 1125.0, 1e-9);
}

TEST(OracleMinCost, KnownInstances) {
  EXPECT_NEAR(oracle_min_cost(prize_model()).cost, 565.0, 1e-9);
  const double dv = 10.0;
  EXPECT_NEAR(oracle_min_cost(two_outcome(0.95, 0.90, dv)).cost, 0.05 * dv * dv, 1e-9);
  auto same = prize_model();
  same.factual = same.counterfactual;
  EXPECT_NEAR(oracle_min_cost(same).cost, 0.0, 1e-12);
}

TEST(OracleMinCost, RefusesLargeSpaces) {
  std::mt19937_64 rng(3);
  EXPECT_THROW(oracle_min_cost(random_model(rng, 7)), std::length_error);
}

TEST(CouplingProperty, MarginalsPreserved) {
  std::mt19937_64 rng(20240611);
  for (int k = 0; k < 500; ++k) {
    const auto m = random_model(rng, 1 + k % 6);
    expect_marginals(m, least_divergence_coupling(m));
    expect_marginals(m, independence_coupling(m));
    expect_marginals(m, oracle_min_cost(m).coupling);
  }
}

TEST(CouplingProperty, ComonotoneMatchesOracle) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 300; ++k) {
    const auto m = random_model(rng, 2 + k % 4);
    const double como = transport_cost(least_divergence_coupling(m));
    EXPECT_NEAR(como, oracle_min_cost(m).cost, 1e-9) << "instance " << k;
  }
}

TEST(CouplingProperty, MonotoneRearrangement) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    const auto m = random_model(rng, 2 + k % 5);
    const auto c = least_divergence_coupling(m);
    const auto& v = m.space.values;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j)
        for (std::size_t i2 = 0; i2 < c.size(); ++i2)
          for (std::size_t j2 = 0; j2 < c.size(); ++j2)
            if (c(i, j) > 1e-14 && c(i2, j2) > 1e-14 && v[i] < v[i2]) EXPECT_LE(v[j], v[j2]);
  }
}

TEST(CouplingProperty, IndependenceHasZeroCovariance) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    const auto m = random_model(rng, 1 + k % 6);
    const auto c = independence_coupling(m);
    const auto& v = m.space.values;
    const double e0 = m.expected_counterfactual();
    const double e1 = m.expected_factual();
    double cov = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = 0; j < c.size(); ++j) cov += c(i, j) * (v[i] - e0) * (v[j] - e1);
    EXPECT_LT(std::abs(cov), 1e-10);
  }
}

TEST(LeastDivergenceCoupling, FlagsTieOrderDependence) {
  CaseModel m;
  m.space = {{"x", "y", "z"}, {1.0, 1.0, 4.0}};
  m.counterfactual = {{0.5, 0.0, 0.5}};
  m.factual = {{0.0, 0.5, 0.5}};
  EXPECT_FALSE(least_divergence_coupling(m).notes.empty());
  m.space.values = {1.0, 2.0, 4.0};
  EXPECT_TRUE(least_divergence_coupling(m).notes.empty());
}

TEST(CouplingCsv, WritesNonZeroCells) {
  const auto m = prize_model();
  std::ostringstream out;
  write_coupling_csv(out, evidence_coupling(m, joint_from_map(m, {0, 1, 2, 3, 2})));
  EXPECT_EQ(out.str(),
            "counterfactual,factual,mass\n"
            "a1,a1,0.20000000000000001\n"
            "a2,a2,0.20000000000000001\n"
            "a3,a3,0.20000000000000001\n"
            "a4,a4,0.20000000000000001\n"
            "a5,a3,0.20000000000000001\n");
}

}  // namespace
}  // namespace lostchance
