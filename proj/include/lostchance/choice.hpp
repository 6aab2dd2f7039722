#pragma once

// Cases in which the victim makes a choice: outcomes are (choice, result)
// pairs, the joint law follows the VK factorization, and the counterfactual
// choice may be fixed by presumption.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lostchance/coupling.hpp"
#include "lostchance/matrix.hpp"
#include "lostchance/outcome_model.hpp"
#include "lostchance/valuation.hpp"

namespace lostchance {

inline constexpr const char* kArgmaxNote =
    "counterfactual choice presumed by arg max (not arg min) of expected value over the duty set";

struct ChoiceCaseModel {
  std::vector<std::string> choices;
  std::vector<std::string> results;
  std::vector<std::size_t> duty_set;  // indices into choices
  Matrix value;                       // V(c, r), choices x results
  MoneyMap money = MoneyMap::identity();

  // Evidence about C0; nullopt leaves the choice to a presumption.
  std::optional<DiscreteDistribution> counterfactual_choice;
  std::vector<DiscreteDistribution> result_given_choice_cf;  // P(R0 | C0 = c)
  std::vector<DiscreteDistribution> result_given_choice_f;   // P(R1 | C1 = c)

  std::size_t factual_choice = 0;
  std::size_t factual_result = 0;
  // Law of C1; defaults to a point mass on factual_choice.
  std::optional<DiscreteDistribution> factual_choice_law;

  // Optional F_R channel per (c0, c1): joint of (R0, R1), indexed c0 * |C| + c1.
  std::optional<std::vector<Matrix>> result_coupling;

  std::vector<std::string> notes;

  std::size_t choice_count() const { return choices.size(); }
  std::size_t result_count() const { return results.size(); }

  DiscreteDistribution factual_choices() const {
    return factual_choice_law ? *factual_choice_law
                              : DiscreteDistribution::point_mass(choices.size(), factual_choice);
  }

  bool dutiful(std::size_t c) const {
    return std::find(duty_set.begin(), duty_set.end(), c) != duty_set.end();
  }

  friend bool operator==(const ChoiceCaseModel&, const ChoiceCaseModel&) = default;
};

// Same shape; describes the case in which the victim's breach of a duty to
// mitigate is itself the tortious act. Values and money are V* and M*.
using DualCaseModel = ChoiceCaseModel;

inline std::string pair_label(const ChoiceCaseModel& m, std::size_t c, std::size_t r) {
  return m.choices[c] + "|" + m.results[r];
}

inline std::vector<std::string> choice_case_issues(const ChoiceCaseModel& m) {
  std::vector<std::string> issues;
  const std::size_t nc = m.choices.size();
  const std::size_t nr = m.results.size();
  if (nc == 0) issues.emplace_back("choice set is empty");
  if (nr == 0) issues.emplace_back("result set is empty");
  if (m.duty_set.empty()) issues.emplace_back("duty set is empty");
  for (std::size_t d : m.duty_set)
    if (d >= nc) issues.push_back("duty set refers to unknown choice index " + std::to_string(d));
  if (m.value.rows() != nc || m.value.cols() != nr)
    issues.emplace_back("value table must have one row per choice and one column per result");
  const auto check = [&](const DiscreteDistribution& d, std::size_t n, const std::string& what) {
    if (d.size() != n) {
      issues.push_back(what + " has " + std::to_string(d.size()) + " weights, expected " +
                       std::to_string(n));
      return;
    }
    for (auto& s : distribution_issues(d, what)) issues.push_back(std::move(s));
  };
  if (m.counterfactual_choice) check(*m.counterfactual_choice, nc, "counterfactual choice law");
  if (m.factual_choice_law) check(*m.factual_choice_law, nc, "factual choice law");
  if (m.result_given_choice_cf.size() != nc || m.result_given_choice_f.size() != nc) {
    issues.emplace_back("one conditional result law per choice is required in each scenario");
  } else {
    for (std::size_t c = 0; c < nc; ++c) {
      check(m.result_given_choice_cf[c], nr, "counterfactual results given " + m.choices[c]);
      check(m.result_given_choice_f[c], nr, "factual results given " + m.choices[c]);
    }
  }
  if (m.factual_choice >= nc || m.factual_result >= nr) {
    issues.emplace_back("factual choice or result index out of range");
  } else if (issues.empty()) {
    const double p = m.factual_choices()[m.factual_choice] *
                     m.result_given_choice_f[m.factual_choice][m.factual_result];
    if (!(p > 0.0))
      issues.push_back("factual pair (" + pair_label(m, m.factual_choice, m.factual_result) +
                       ") has zero probability under the factual law");
  }
  if (m.result_coupling && m.result_coupling->size() != nc * nc)
    issues.emplace_back("result coupling needs one matrix per (counterfactual, factual) choice pair");
  return issues;
}

inline const ChoiceCaseModel& validate_choice_case(const ChoiceCaseModel& m) {
  auto issues = choice_case_issues(m);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return m;
}

// E[V0 | C0 = c]
inline double expected_choice_value(const ChoiceCaseModel& m, std::size_t c) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.result_count(); ++r) s += m.result_given_choice_cf[c][r] * m.value(c, r);
  return s;
}

// Duty-set choice with the highest expected counterfactual value. Ties go to
// the factual choice, then to the earliest label.
inline std::size_t presumed_choice(const ChoiceCaseModel& m) {
  if (m.duty_set.empty()) throw ConfigurationError("choice presumption requires a non-empty duty set");
  std::vector<std::size_t> duty = m.duty_set;
  std::sort(duty.begin(), duty.end());
  double best = -INFINITY;
  for (std::size_t c : duty) best = std::max(best, expected_choice_value(m, c));
  double scale = 1.0;
  for (double v : m.value.data()) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  std::vector<std::size_t> top;
  for (std::size_t c : duty)
    if (expected_choice_value(m, c) >= best - tol) top.push_back(c);
  if (std::find(top.begin(), top.end(), m.factual_choice) != top.end()) return m.factual_choice;
  return top.front();
}

namespace detail {
inline ChoiceCaseModel with_presumed_choice(ChoiceCaseModel m) {
  m.counterfactual_choice = DiscreteDistribution::point_mass(m.choice_count(), presumed_choice(m));
  if (std::find(m.notes.begin(), m.notes.end(), kArgmaxNote) == m.notes.end())
    m.notes.emplace_back(kArgmaxNote);
  return m;
}
}  // namespace detail

// Rebuttable presumption: evidence about the counterfactual choice prevails.
inline ChoiceCaseModel presume_choice_it_cp(const ChoiceCaseModel& m) {
  if (m.duty_set.empty()) throw ConfigurationError("choice presumption requires a non-empty duty set");
  if (m.counterfactual_choice) return m;
  return detail::with_presumed_choice(m);
}

// Irrebuttable presumption: evidence is discarded.
inline ChoiceCaseModel presume_choice_ii_cp(const ChoiceCaseModel& m) {
  return detail::with_presumed_choice(m);
}

// Joint law of (C0, R0, C1, R1) as a matrix with rows (c0, r0) and columns
// (c1, r1), each flattened as c * |R| + r:
//   P(c0, r0, c1, r1) = P(c0) P(c1) Q_{c0,c1}(r0, r1)
// where Q has marginals P(R0 | c0) and P(R1 | c1). Without a supplied Q the
// comonotone coupling in value order is used.
inline Matrix vk_factorize(const ChoiceCaseModel& m) {
  validate_choice_case(m);
  if (!m.counterfactual_choice)
    throw ConfigurationError("counterfactual choice is unresolved: supply evidence or apply a presumption");
  const std::size_t nc = m.choice_count();
  const std::size_t nr = m.result_count();
  const auto& pc0 = *m.counterfactual_choice;
  const auto pc1 = m.factual_choices();

  std::vector<std::vector<std::size_t>> order(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<double> row(nr);
    for (std::size_t r = 0; r < nr; ++r) row[r] = m.value(c, r);
    order[c] = value_order(OutcomeSpace{m.results, row});
  }

  Matrix joint(nc * nr, nc * nr, 0.0);
  for (std::size_t c0 = 0; c0 < nc; ++c0)
    for (std::size_t c1 = 0; c1 < nc; ++c1) {
      const double w = pc0[c0] * pc1[c1];
      if (w == 0.0) continue;
      Matrix q;
      if (m.result_coupling) {
        q = (*m.result_coupling)[c0 * nc + c1];
        const auto rows = q.row_sums();
        const auto cols = q.col_sums();
        bool ok = q.rows() == nr && q.cols() == nr;
        for (std::size_t r = 0; ok && r < nr; ++r)
          ok = std::abs(rows[r] - m.result_given_choice_cf[c0][r]) <= kMarginalTolerance &&
               std::abs(cols[r] - m.result_given_choice_f[c1][r]) <= kMarginalTolerance;
        if (!ok)
          throw ValidationError({"result coupling for (" + m.choices[c0] + ", " + m.choices[c1] +
                                 ") does not reproduce the conditional result laws"});
      } else {
        q = comonotone_joint(m.result_given_choice_cf[c0].weights, m.result_given_choice_f[c1].weights,
                             order[c0], order[c1]);
      }
      for (std::size_t r0 = 0; r0 < nr; ++r0)
        for (std::size_t r1 = 0; r1 < nr; ++r1) joint(c0 * nr + r0, c1 * nr + r1) += w * q(r0, r1);
    }
  return joint;
}

struct FlatChoiceCase {
  CaseModel model;
  Matrix joint;  // VK joint, usable as E-C evidence
  std::vector<std::string> notes;
};

// Outcome space C x R with labels "choice|result".
inline FlatChoiceCase flatten_choice_case(const ChoiceCaseModel& m) {
  const Matrix joint = vk_factorize(m);
  const std::size_t nc = m.choice_count();
  const std::size_t nr = m.result_count();
  FlatChoiceCase out;
  out.joint = joint;
  out.notes = m.notes;
  out.model.money = m.money;
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t r = 0; r < nr; ++r) {
      out.model.space.labels.push_back(pair_label(m, c, r));
      out.model.space.values.push_back(m.value(c, r));
    }
  out.model.counterfactual.weights = joint.row_sums();
  out.model.factual.weights = joint.col_sums();
  out.model.factual_observed = m.factual_choice * nr + m.factual_result;
  return out;
}

// Schedule for a resolved choice case. E-C and the published-table connection
// use the VK joint; LD-C and I-C build their own couplings from its marginals.
inline CompensationSchedule evaluate_choice_policy(const ChoiceCaseModel& m, const PolicyCombo& combo,
                                                   const std::optional<Blocks>& custom = std::nullopt) {
  const auto flat = flatten_choice_case(m);
  std::optional<Blocks> blocks = custom;
  if (combo.info == InfoRestriction::custom && !blocks) {
    Blocks one(1);
    for (std::size_t o = 0; o < flat.model.space.size(); ++o) one[0].push_back(o);
    blocks = one;
  }
  auto s = evaluate_policy(flat.model, combo, flat.joint, blocks);
  s.notes.insert(s.notes.end(), flat.notes.begin(), flat.notes.end());
  return s;
}

// Monetary award at the observed factual pair.
inline double choice_award(const ChoiceCaseModel& m, const PolicyCombo& combo,
                           const std::optional<Blocks>& custom = std::nullopt) {
  const auto s = evaluate_choice_policy(m, combo, custom);
  return s.award_at(pair_label(m, m.factual_choice, m.factual_result));
}

// Award owed by the victim as dual tortfeasor; zero when the factual choice
// was dutiful. The dual counterfactual choice follows the IT-CP presumption.
inline double dual_award(const DualCaseModel& dual, const PolicyCombo& combo) {
  if (dual.dutiful(dual.factual_choice)) return 0.0;
  return choice_award(presume_choice_it_cp(dual), combo);
}

// max(0, main award - dual award)
inline double mitigation_offset(double main_award, const DualCaseModel& dual, const PolicyCombo& combo) {
  return std::max(0.0, main_award - dual_award(dual, combo));
}

// ---------------------------------------------------------------------------
// Quiz-show case: a question with no correct answer was put to a contestant
// who could answer (winning 1,000,000 or leaving with 300) or stop with 500,000.

inline constexpr double kMatosLow = 300.0;
inline constexpr double kMatosKeep = 500000.0;
inline constexpr double kMatosHigh = 1000000.0;
inline constexpr const char* kMatosDutyNote =
    "duty set taken as {answer, not answer} rather than {answer}: declining to answer is dutiful";

inline ChoiceCaseModel matos_case(double p, double theta) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
  const UtilityCurve curve{theta};
  ChoiceCaseModel m;
  m.choices = {"answer", "not answer"};
  m.results = {"300", "500000", "1000000"};
  m.duty_set = {0, 1};
  m.value = Matrix(2, 3);
  const double amounts[] = {kMatosLow, kMatosKeep, kMatosHigh};
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t r = 0; r < 3; ++r) m.value(c, r) = utility_value(curve, amounts[r]);
  m.money = MoneyMap::inverse_of(curve).anchored_at({kMatosLow, kMatosKeep, kMatosHigh});
  m.result_given_choice_cf = {{{1.0 - p, 0.0, p}}, DiscreteDistribution::point_mass(3, 1)};
  // Four options, none correct: a random pick still wins with probability 1/4.
  m.result_given_choice_f = {{{0.75, 0.0, 0.25}}, DiscreteDistribution::point_mass(3, 1)};
  m.factual_choice = 1;
  m.factual_result = 1;
  m.notes.emplace_back(kMatosDutyNote);
  return m;
}

// Zero-award threshold (V(500000) - V(300)) / (V(1000000) - V(300)).
inline double matos_threshold(double theta) {
  const UtilityCurve c{theta};
  const double lo = utility_value(c, kMatosLow);
  return (utility_value(c, kMatosKeep) - lo) / (utility_value(c, kMatosHigh) - lo);
}

inline double matos_award(double p, double theta, const PolicyCombo& combo) {
  return choice_award(presume_choice_it_cp(matos_case(p, theta)), combo);
}

inline double matos_award(double p, double theta) {
  return matos_award(p, theta, {InfoRestriction::high, Connection::evidence, Indemnity::closest});
}

}  // namespace lostchance
