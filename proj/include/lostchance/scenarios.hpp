#pragma once

// Built-in parametric cases and sweep generators.

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lostchance/choice.hpp"
#include "lostchance/coupling.hpp"
#include "lostchance/csv.hpp"
#include "lostchance/matrix.hpp"
#include "lostchance/outcome_model.hpp"
#include "lostchance/valuation.hpp"

namespace lostchance {

struct Scenario {
  std::string name;
  CaseModel model;
  std::optional<Matrix> evidence;   // coupling proven by evidence
  std::optional<Matrix> published;  // coupling printed for the least-divergence row
  std::vector<std::string> notes;

  CompensationSchedule evaluate(const PolicyCombo& combo) const {
    const auto& joint = combo.connection == Connection::published_table ? published : evidence;
    return evaluate_policy(model, combo, joint);
  }
};

namespace detail {

inline void check_chances(double p0, double p1) {
  if (!(p1 >= 0.0 && p1 <= p0 && p0 <= 1.0))
    throw std::invalid_argument("probabilities must satisfy 0 <= p1 <= p0 <= 1");
}

// Two outcomes (0 = worse, 1 = better) with P(better) = p0 and p1.
inline CaseModel two_outcome_model(const std::string& worse, const std::string& better, double v_worse,
                                   double v_better, double p0, double p1) {
  CaseModel m;
  m.space = {{worse, better}, {v_worse, v_better}};
  m.counterfactual = {{1.0 - p0, p0}};
  m.factual = {{1.0 - p1, p1}};
  m.factual_observed = p1 < 1.0 ? 0 : 1;
  return m;
}

// A uniform F drives both draws: better outcome iff F < p.
inline Matrix threshold_joint(double p0, double p1) {
  return Matrix::from_rows({{1.0 - p0, 0.0}, {p0 - p1, p1}});
}

}  // namespace detail

// Misdiagnosis lowers the chance of the good outcome from p0 to p1.
inline Scenario medical_malpractice(double p0, double p1, double delta_v) {
  detail::check_chances(p0, p1);
  if (!(delta_v > 0.0)) throw std::invalid_argument("delta_v must be positive");
  Scenario s{"medical", detail::two_outcome_model("bad", "good", 0.0, delta_v, p0, p1),
             detail::threshold_joint(p0, p1), std::nullopt, {}};
  return s;
}

// Balls drawn from two different boxes: the draws are independent.
inline Scenario urn_independent(double p0, double p1, double v_r, double v_b) {
  detail::check_chances(p0, p1);
  if (!(v_b > v_r)) throw std::invalid_argument("blue must be worth more than red");
  Scenario s{"urn-independent", detail::two_outcome_model("red", "blue", v_r, v_b, p0, p1), std::nullopt,
             std::nullopt, {}};
  s.evidence = independence_coupling(s.model).joint;
  return s;
}

// Blue balls in the same box painted red: a ball stays blue only if it was.
inline Scenario urn_painted(double p0, double p1, double v_r, double v_b) {
  detail::check_chances(p0, p1);
  if (!(v_b > v_r)) throw std::invalid_argument("blue must be worth more than red");
  return {"urn-painted", detail::two_outcome_model("red", "blue", v_r, v_b, p0, p1),
          detail::threshold_joint(p0, p1), std::nullopt, {}};
}

inline constexpr const char* kPublishedRowNote =
    "published least-divergence row has transport cost 1125; the comonotone coupling attains 565";

// One of five prizes; the tort replaces the chance of a5 by an extra chance of a3.
inline Scenario prize_case() {
  Scenario s;
  s.name = "prize";
  s.model.space = {{"a1", "a2", "a3", "a4", "a5"}, {5, 30, 35, 70, 110}};
  s.model.counterfactual = DiscreteDistribution::uniform(5);
  s.model.factual = {{0.2, 0.2, 0.4, 0.2, 0.0}};
  s.evidence = joint_from_map(s.model, {2, 2, 1, 0, 3});
  s.published = joint_from_map(s.model, {0, 1, 2, 3, 2});
  s.notes.emplace_back(kPublishedRowNote);
  return s;
}

// Two patient types; each treatment cures its own type with probability
// `match` and the other type with `mismatch`. The physician applied
// treatment 1 without consulting. With `known_type` the patient proved
// knowledge of the type, otherwise the type is an unobserved factor.
inline ChoiceCaseModel treatment_case(double match, double mismatch, double delta_v,
                                      std::optional<int> known_type = std::nullopt) {
  if (!(match >= 0.0 && match <= 1.0 && mismatch >= 0.0 && mismatch <= 1.0))
    throw std::invalid_argument("cure probabilities must lie in [0, 1]");
  if (known_type && *known_type != 1 && *known_type != 2)
    throw std::invalid_argument("patient type must be 1 or 2");
  const auto cure = [&](int treatment) {
    if (!known_type) return 0.5 * (match + mismatch);
    return treatment == *known_type ? match : mismatch;
  };
  ChoiceCaseModel m;
  m.choices = {"treatment 1", "treatment 2"};
  m.results = {"not cured", "cured"};
  m.duty_set = {0, 1};
  m.value = Matrix::from_rows({{0.0, delta_v}, {0.0, delta_v}});
  for (int t = 1; t <= 2; ++t) {
    const double q = cure(t);
    m.result_given_choice_cf.push_back({{1.0 - q, q}});
    m.result_given_choice_f.push_back({{1.0 - q, q}});
  }
  m.factual_choice = 0;
  m.factual_result = m.result_given_choice_f[0][0] > 0.0 ? 0 : 1;
  return m;
}

struct TenantCase {
  ChoiceCaseModel main;  // landlord's loss from the early departure
  DualCaseModel dual;    // landlord's failure to re-let
};

// Tenant leaves early costing the landlord `rent_lost`; re-letting would have
// recovered `recoverable`. The landlord did not try to re-let.
inline TenantCase tenant_case(double rent_lost = 1000.0, double recoverable = 300.0) {
  TenantCase t;
  auto& m = t.main;
  m.choices = {"stay"};
  m.results = {"rent paid", "rent lost"};
  m.duty_set = {0};
  m.value = Matrix::from_rows({{rent_lost, 0.0}});
  m.result_given_choice_cf = {DiscreteDistribution::point_mass(2, 0)};
  m.result_given_choice_f = {DiscreteDistribution::point_mass(2, 1)};
  m.counterfactual_choice = DiscreteDistribution::point_mass(1, 0);
  m.factual_result = 1;

  auto& d = t.dual;
  d.choices = {"re-let", "leave empty"};
  d.results = {"recovered", "nothing"};
  d.duty_set = {0};
  d.value = Matrix::from_rows({{recoverable, 0.0}, {recoverable, 0.0}});
  d.result_given_choice_cf = {DiscreteDistribution::point_mass(2, 0), DiscreteDistribution::point_mass(2, 1)};
  d.result_given_choice_f = d.result_given_choice_cf;
  d.factual_choice = 1;
  d.factual_result = 1;
  return t;
}

// ---------------------------------------------------------------------------
// Quiz-show sweep

struct MatosRow {
  double theta = 0.0;
  double p = 0.0;
  double award = 0.0;
  int band = 0;  // 0: no award; k: award in (125000 (k-1), 125000 k]
};

inline int matos_band(double award) {
  if (!(award > 0.0)) return 0;
  const int k = static_cast<int>(std::ceil(award / 125000.0 - 1e-9));
  return std::clamp(k, 1, 4);
}

// Evenly spaced points over [0, 1]; count 1 gives {0}, count 0 gives {}.
inline std::vector<double> unit_grid(std::size_t count) {
  std::vector<double> g;
  for (std::size_t i = 0; i < count; ++i)
    g.push_back(count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1));
  return g;
}

inline std::vector<MatosRow> matos_sweep(const std::vector<double>& theta_grid,
                                         const std::vector<double>& p_grid) {
  for (double t : theta_grid)
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("theta grid must lie in [0, 1]");
  for (double p : p_grid)
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p grid must lie in [0, 1]");
  std::vector<MatosRow> rows;
  rows.reserve(theta_grid.size() * p_grid.size());
  for (double t : theta_grid)
    for (double p : p_grid) {
      const double a = matos_award(p, t);
      rows.push_back({t, p, a, matos_band(a)});
    }
  return rows;
}

inline void write_matos_csv(std::ostream& out, const std::vector<MatosRow>& rows) {
  out << "theta,p,award,band\n";
  for (const auto& r : rows)
    out << format_full(r.theta) << ',' << format_full(r.p) << ',' << format_full(r.award) << ','
        << r.band << '\n';
}

struct MedicalRow {
  double p0 = 0.0;
  double p1 = 0.0;
  std::string policy;
  std::string outcome;
  double award = 0.0;
};

// Awards at the bad outcome as p1 runs over [0, p0].
inline std::vector<MedicalRow> medical_sweep(double p0, double delta_v, std::size_t p1_points,
                                             const std::vector<PolicyCombo>& combos) {
  std::vector<MedicalRow> rows;
  for (double u : unit_grid(p1_points)) {
    const double p1 = p0 * u;
    const auto s = medical_malpractice(p0, p1, delta_v);
    for (const auto& combo : combos)
      rows.push_back({p0, p1, combo.descriptor(), "bad", s.evaluate(combo).award_at("bad")});
  }
  return rows;
}

inline void write_medical_csv(std::ostream& out, const std::vector<MedicalRow>& rows) {
  out << "p0,p1,policy,outcome,award\n";
  for (const auto& r : rows)
    out << format_full(r.p0) << ',' << format_full(r.p1) << ',' << csv_field(r.policy) << ','
        << csv_field(r.outcome) << ',' << format_full(r.award) << '\n';
}

// ---------------------------------------------------------------------------
// The proportional-to-survival formula (p0 - p1) / p0 * delta_v

struct LabeledValue {
  std::string label;
  double value = 0.0;
  std::string flag;
};

inline constexpr const char* kRejectedFormulaFlag = "no restriction combination derives this value";

inline LabeledValue rejected_formula_comparison(double p0, double p1, double delta_v) {
  if (!(p0 > 0.0)) throw std::invalid_argument("p0 must be positive");
  return {"(p0 - p1) / p0 * delta_v", (p0 - p1) / p0 * delta_v, kRejectedFormulaFlag};
}

}  // namespace lostchance
