#include "lostchance/verify.hpp"

#include "gtest/gtest.h"

namespace lostchance {
namespace {

TEST(Verify, AllPropertiesHold) {
  VerifyOptions opt;
  opt.seed = 7;
  opt.instances = 120;
  const auto report = run_verification(opt);
  EXPECT_TRUE(report.ok()) << report.render();
  for (const auto& p : report.properties) EXPECT_GT(p.passed, 0u) << p.name;
}

TEST(Verify, DeterministicForASeed) {
  VerifyOptions opt;
  opt.seed = 99;
  opt.instances = 30;
  EXPECT_EQ(run_verification(opt).render(), run_verification(opt).render());
}

TEST(Verify, LambdaFaultBreaksTheMeanConstraint) {
  VerifyOptions opt;
  opt.seed = 3;
  opt.instances = 40;
  opt.lambda_fault = 0.5;
  const auto report = run_verification(opt);
  EXPECT_FALSE(report.ok());
  const auto* mean = report.find("FM-I mean equals expected loss");
  ASSERT_NE(mean, nullptr);
  EXPECT_GT(mean->failed, 0u);
  EXPECT_NE(report.render().find("property violations found"), std::string::npos);
  EXPECT_EQ(report.find("comonotone cost equals oracle minimum")->failed, 0u);
}

TEST(Verify, ZeroInstances) {
  VerifyOptions opt;
  opt.instances = 0;
  const auto report = run_verification(opt);
  EXPECT_TRUE(report.ok());
}

}  // namespace
}  // namespace lostchance
