#include "lostchance/case_file.hpp"

#include <random>

#include "gtest/gtest.h"
#include "lostchance/scenarios.hpp"

namespace lostchance {
namespace {

std::string case_path(const std::string& name) { return std::string(LOSTCHANCE_CASES_DIR) + "/" + name; }

PolicyCombo combo(InfoRestriction i, Connection c, Indemnity d) { return {i, c, d}; }

const char* kMedical = R"({
  "outcomes": [{"label": "bad", "value": 0}, {"label": "good", "value": 10}],
  "counterfactual": [0.4, 0.6],
  "factual": [0.7, 0.3]
})";

std::string with(const std::string& base, const std::string& extra) {
  auto j = nlohmann::json::parse(base);
  j.merge_patch(nlohmann::json::parse(extra));
  return j.dump();
}

TEST(CaseFile, PrizeMatchesTheGenerator) {
  const auto f = load_case(case_path("prize.json"));
  const auto s = prize_case();
  ASSERT_TRUE(f.model);
  EXPECT_EQ(*f.model, s.model);
  EXPECT_EQ(f.evidence, s.evidence);
  EXPECT_EQ(f.published, s.published);
  const auto x = evaluate_case(f, combo(InfoRestriction::high, Connection::evidence, Indemnity::closest));
  EXPECT_DOUBLE_EQ(x.award_at("a1"), 65.0);
  EXPECT_DOUBLE_EQ(x.award_at("a2"), 5.0);
  EXPECT_DOUBLE_EQ(x.award_at("a3"), 0.0);
  EXPECT_DOUBLE_EQ(x.award_at("a4"), 40.0);
}

TEST(CaseFile, MedicalMatchesTheGenerator) {
  const auto f = load_case(case_path("medical.json"));
  const auto s = medical_malpractice(0.95, 0.90, 100000.0);
  EXPECT_EQ(f.model->space, s.model.space);
  const auto x = evaluate_case(f, combo(InfoRestriction::high, Connection::evidence, Indemnity::closest));
  EXPECT_NEAR(x.award_at("bad"), 50000.0, 1e-6);
  EXPECT_EQ(observed_label(f), "bad");
}

TEST(CaseFile, MatosMatchesTheGenerator) {
  const auto f = load_case(case_path("matos.json"));
  ASSERT_TRUE(f.is_choice());
  auto expected = matos_case(0.75, 0.5);
  expected.notes.clear();
  EXPECT_EQ(*f.choice, expected);
  const auto x = evaluate_case(f, combo(InfoRestriction::high, Connection::evidence, Indemnity::closest));
  EXPECT_NEAR(x.award_at(*observed_label(f)), matos_award(0.75, 0.5), 1e-9);
}

TEST(CaseFile, TenantDual) {
  const auto f = load_case(case_path("tenant.json"));
  const auto t = tenant_case();
  EXPECT_EQ(*f.choice, t.main);
  EXPECT_EQ(*f.dual, t.dual);
}

TEST(CaseFile, RoundTripSampleFiles) {
  for (const char* name : {"prize.json", "medical.json", "matos.json", "tenant.json"}) {
    const auto f = load_case(case_path(name));
    const auto text = serialize_case(f);
    EXPECT_EQ(parse_case_text(text), f) << name;
    EXPECT_EQ(serialize_case(parse_case_text(text)), text) << name;
  }
}

TEST(CaseFile, RoundTripRandomModels) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    CaseFile f;
    f.model.emplace();
    const std::size_t n = 1 + k % 6;
    std::vector<double> a(n), b(n);
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      f.model->space.labels.push_back("o" + std::to_string(i));
      f.model->space.values.push_back(1000.0 * u(rng) - 300.0);
      sa += a[i] = u(rng);
      sb += b[i] = u(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    f.model->counterfactual = {a};
    f.model->factual = {b};
    {
      if (k % 3 == 0) f.money = MoneyMap::inverse_of({u(rng)});
      f.model->money = f.money;
      f.model->factual_observed = k % n;
      const auto back = parse_case_text(serialize_case(f));
      EXPECT_EQ(back, f);
    }
  }
}

TEST(CaseFile, MalformedMarginalReportsNormalization) {
  const auto bad = with(kMedical, R"({"factual": [0.7, 0.29]})");
  try {
    parse_case_text(bad);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("normalization"), std::string::npos) << e.what();
  }
}

TEST(CaseFile, UnknownKeysRejected) {
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"colour": "red"})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"money": {"kind": "identity", "theta": 1}})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"evidence": {"matrix": [[0.4, 0], [0.3, 0.3]], "x": 1}})")),
               CaseFileError);
}

TEST(CaseFile, StructuralErrors) {
  EXPECT_THROW(parse_case_text("{"), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"observed": "nowhere"})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"factual": [1]})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"factual": {"ugly": 1}})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"counterfactual": "all"})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"evidence": {"matrix": [[1, 0], [0]]}})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"evidence": {"map": {"bad": "bad"}}})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"money": {"kind": "crra", "theta": 2}})")), CaseFileError);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"partition": [["bad", "worse"]]})")), CaseFileError);
  EXPECT_THROW(parse_case_text(R"({"outcomes": [{"label": "a", "value": 1}, {"label": "a", "value": 2}],
                                   "counterfactual": [0.5, 0.5], "factual": [0.5, 0.5]})"),
               CaseFileError);
}

TEST(CaseFile, EvidenceMustCoupleTheMarginals) {
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"evidence": {"matrix": [[0.5, 0], [0.2, 0.3]]}})")),
               ValidationError);
  const auto f = parse_case_text(with(kMedical, R"({"evidence": {"matrix": [[0.4, 0], [0.3, 0.3]]}})"));
  EXPECT_TRUE(f.evidence);
}

TEST(CaseFile, MissingEvidenceIsExplicit) {
  const auto f = parse_case_text(kMedical);
  try {
    evaluate_case(f, combo(InfoRestriction::high, Connection::evidence, Indemnity::closest));
    FAIL() << "expected a configuration error";
  } catch (const ConfigurationError& e) {
    EXPECT_NE(std::string(e.what()).find("evidence"), std::string::npos);
  }
  EXPECT_NO_THROW(evaluate_case(f, combo(InfoRestriction::high, Connection::independence, Indemnity::closest)));
  EXPECT_THROW(evaluate_case(f, combo(InfoRestriction::custom, Connection::independence, Indemnity::closest)),
               ConfigurationError);
}

TEST(CaseFile, CustomPartition) {
  const auto f = parse_case_text(with(kMedical, R"({"partition": [["bad", "good"]]})"));
  const auto x = evaluate_case(f, combo(InfoRestriction::custom, Connection::independence, Indemnity::closest));
  EXPECT_NEAR(x.award_at("bad"), x.award_at("good"), 1e-12);
}

TEST(CaseFile, TabulatedMoney) {
  const auto f = parse_case_text(with(kMedical, R"({"money": {"kind": "tabulated", "points": [[0, 0], [10, 40]]}})"));
  EXPECT_EQ(f.money.kind(), MoneyMap::Kind::tabulated);
  EXPECT_EQ(f.model->money, f.money);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"money": {"kind": "tabulated", "points": [[0, 0]]}})")),
               CaseFileError);
}

TEST(CaseFile, MoneyAnchors) {
  const auto f = parse_case_text(with(kMedical, R"({"money": {"kind": "crra", "theta": 1, "anchors": [4, 2, 4]}})"));
  ASSERT_EQ(f.money.anchors().size(), 2u);
  EXPECT_EQ(f.money.money(f.money.value(4.0)), 4.0);
  EXPECT_EQ(parse_case_text(serialize_case(f)), f);
  EXPECT_THROW(parse_case_text(with(kMedical, R"({"money": {"kind": "crra", "theta": 1, "anchors": [-1]}})")),
               CaseFileError);
  const auto matos = load_case(case_path("matos.json"));
  EXPECT_EQ(matos.money.anchors().size(), 3u);
  EXPECT_EQ(matos.choice->money, matos.money);
}

TEST(CaseFile, ChoiceBlockErrors) {
  auto j = nlohmann::json::parse(std::ifstream(case_path("matos.json")));
  auto bad = j;
  bad["choice"]["dual"] = true;
  EXPECT_THROW(parse_case(bad), CaseFileError);
  bad = j;
  bad["choice"]["values"] = {{1, 2, 3}, {1, 2, 3}};
  EXPECT_THROW(parse_case(bad), CaseFileError);
  bad = j;
  bad["choice"]["presumption"] = "guess";
  EXPECT_THROW(parse_case(bad), CaseFileError);
  bad = j;
  bad["outcomes"] = nlohmann::json::array();
  EXPECT_THROW(parse_case(bad), CaseFileError);
  bad = j;
  bad["choice"]["factual_results"]["not answer"] = {{"500000", 0.5}};
  EXPECT_THROW(parse_case(bad), ValidationError);
}

TEST(CaseFile, SchemaNamesEveryTopLevelKey) {
  const std::string schema = kCaseFileSchema;
  for (const char* key : {"name", "notes", "money", "partition", "outcomes", "counterfactual", "factual",
                          "observed", "evidence", "published", "choice", "dual", "presumption"})
    EXPECT_NE(schema.find(std::string("\"") + key + "\""), std::string::npos) << key;
}

}  // namespace
}  // namespace lostchance
