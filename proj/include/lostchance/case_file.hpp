#pragma once

// JSON case files: one case per file, parsed strictly and written back losslessly.

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lostchance/choice.hpp"
#include "lostchance/coupling.hpp"
#include "lostchance/csv.hpp"
#include "lostchance/outcome_model.hpp"
#include "lostchance/valuation.hpp"

namespace lostchance {

// Malformed document: bad JSON, unknown keys, wrong types, unknown labels.
class CaseFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Presumption { it_cp, ii_cp };

inline std::string_view to_string(Presumption p) { return p == Presumption::it_cp ? "it-cp" : "ii-cp"; }

struct CaseFile {
  std::string name;
  std::vector<std::string> notes;
  MoneyMap money = MoneyMap::identity();

  // Outcome cases.
  std::optional<CaseModel> model;
  std::optional<Matrix> evidence;
  std::optional<Matrix> published;

  // Choice cases.
  std::optional<ChoiceCaseModel> choice;
  std::optional<Presumption> presumption;
  std::optional<ChoiceCaseModel> dual;

  // Custom information partition as outcome labels ("choice|result" in choice cases).
  std::optional<std::vector<std::vector<std::string>>> partition;

  bool is_choice() const { return choice.has_value(); }

  friend bool operator==(const CaseFile&, const CaseFile&) = default;
};

inline constexpr const char* kCaseFileSchema = R"(case file grammar (JSON, one case per file, unknown keys rejected)

  {
    "name":   string                                     optional
    "notes":  [string, ...]                              optional
    "money":  {"kind": "identity"}                       optional, default identity
            | {"kind": "crra", "theta": number in [0,1]}   M = inverse of the CRRA utility
            | {"kind": "tabulated", "points": [[value, money], ...]}
              any kind may add "anchors": [money, ...], amounts priced exactly
    "partition": [[label, ...], ...]                     optional, used by --info custom

    outcome case:
    "outcomes":       [{"label": string, "value": number}, ...]
    "counterfactual": distribution over outcomes
    "factual":        distribution over outcomes
    "observed":       label                              optional
    "evidence":       coupling                           optional, needed by e-c
    "published":      coupling                           optional, needed by published-table

    choice case (instead of the outcome keys):
    "choice": choice block
    "dual":   choice block                               optional, victim's mitigation case
  }

  distribution := [number, ...]  in outcome order
                | {label: number, ...}  absent labels weigh 0
  coupling     := {"matrix": [[number, ...], ...]}  rows counterfactual, columns factual
                | {"map": {label: label, ...}}  deterministic counterfactual -> factual

  choice block:
  {
    "choices": [string, ...]
    "results": [string, ...]
    "duty":    [choice, ...]
    "values":       {choice: {result: number}}  or [[number, ...], ...]
    "result_money": same shapes, converted to values through the money map,
                    whose amounts become money anchors
                    (exactly one of values / result_money)
    "counterfactual_choice":  distribution over choices       optional
    "counterfactual_results": {choice: distribution over results}
    "factual_results":        {choice: distribution over results}
    "factual_choice":     choice
    "factual_result":     result
    "factual_choice_law": distribution over choices           optional
    "result_coupling": [matrix, ...]  one per (c0, c1), index c0 * |choices| + c1   optional
    "presumption": "it-cp" | "ii-cp"                          optional, main block only
  }
)";

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw CaseFileError(where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw CaseFileError("unknown key '" + key + "' in " + where);
  }
}

inline const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw CaseFileError(where + " is missing '" + key + "'");
  return j.at(key);
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw CaseFileError(where + " must be a number");
  return j.get<double>();
}

inline std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw CaseFileError(where + " must be a string");
  return j.get<std::string>();
}

inline std::vector<std::string> strings(const json& j, const std::string& where) {
  if (!j.is_array()) throw CaseFileError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(text(e, where + " entry"));
  return out;
}

inline std::vector<std::string> unique_labels(const json& j, const std::string& where) {
  auto labels = strings(j, where);
  std::set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second) throw CaseFileError("duplicate label '" + l + "' in " + where);
  return labels;
}

inline std::size_t index_in(const std::vector<std::string>& labels, const json& j, const std::string& where) {
  const auto label = text(j, where);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return i;
  throw CaseFileError(where + " names unknown label '" + label + "'");
}

inline DiscreteDistribution distribution(const json& j, const std::vector<std::string>& labels,
                                         const std::string& where) {
  DiscreteDistribution d;
  if (j.is_array()) {
    if (j.size() != labels.size())
      throw CaseFileError(where + " has " + std::to_string(j.size()) + " weights, expected " +
                          std::to_string(labels.size()));
    for (const auto& w : j) d.weights.push_back(number(w, where + " weight"));
    return d;
  }
  if (!j.is_object()) throw CaseFileError(where + " must be an array or a label -> weight object");
  d.weights.assign(labels.size(), 0.0);
  for (const auto& [label, w] : j.items()) d.weights[index_in(labels, label, where)] = number(w, where + " weight");
  return d;
}

inline Matrix matrix(const json& j, const std::string& where) {
  if (!j.is_array()) throw CaseFileError(where + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) throw CaseFileError(where + " rows must be arrays");
    rows.emplace_back();
    for (const auto& x : row) rows.back().push_back(number(x, where + " entry"));
    if (rows.back().size() != rows.front().size()) throw CaseFileError(where + " rows differ in length");
  }
  return Matrix::from_rows(rows);
}

inline Matrix coupling(const json& j, const CaseModel& m, const std::string& where) {
  check_keys(j, where, {"matrix", "map"});
  if (j.contains("matrix") == j.contains("map")) throw CaseFileError(where + " needs exactly one of 'matrix' or 'map'");
  if (j.contains("matrix")) return matrix(j.at("matrix"), where + ".matrix");
  const auto& map = j.at("map");
  if (!map.is_object()) throw CaseFileError(where + ".map must be a label -> label object");
  std::vector<std::optional<std::size_t>> target(m.space.size());
  for (const auto& [from, to] : map.items())
    target[index_in(m.space.labels, from, where + ".map")] = index_in(m.space.labels, to, where + ".map");
  std::vector<std::size_t> full;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (!target[i]) throw CaseFileError(where + ".map has no target for '" + m.space.labels[i] + "'");
    full.push_back(*target[i]);
  }
  return joint_from_map(m, full);
}

inline MoneyMap money_kind(const json& j) {
  const auto kind = text(need(j, "kind", "money"), "money.kind");
  if (kind == "identity") {
    if (j.contains("theta") || j.contains("points")) throw CaseFileError("identity money map takes no parameters");
    return MoneyMap::identity();
  }
  if (kind == "crra") {
    if (j.contains("points")) throw CaseFileError("crra money map takes 'theta' only");
    try {
      return MoneyMap::inverse_of({number(need(j, "theta", "money"), "money.theta")});
    } catch (const std::logic_error& e) {
      throw CaseFileError(std::string("money: ") + e.what());
    }
  }
  if (kind == "tabulated") {
    if (j.contains("theta")) throw CaseFileError("tabulated money map takes 'points' only");
    std::vector<MoneyMap::Point> pts;
    const auto m = matrix(need(j, "points", "money"), "money.points");
    if (m.rows() > 0 && m.cols() != 2) throw CaseFileError("money.points entries must be [value, money]");
    for (std::size_t i = 0; i < m.rows(); ++i) pts.push_back({m(i, 0), m(i, 1)});
    try {
      return MoneyMap::tabulated(std::move(pts));
    } catch (const std::logic_error& e) {
      throw CaseFileError(std::string("money: ") + e.what());
    }
  }
  throw CaseFileError("money.kind must be identity, crra or tabulated, got '" + kind + "'");
}

inline MoneyMap money(const json& j) {
  check_keys(j, "money", {"kind", "theta", "points", "anchors"});
  auto m = money_kind(j);
  if (!j.contains("anchors")) return m;
  const auto& list = j.at("anchors");
  if (!list.is_array()) throw CaseFileError("money.anchors must be an array of money amounts");
  std::vector<double> amounts;
  for (const auto& x : list) amounts.push_back(number(x, "money.anchors entry"));
  try {
    return m.anchored_at(amounts);
  } catch (const std::logic_error& e) {
    throw CaseFileError(std::string("money.anchors: ") + e.what());
  }
}

// Every number under a result_money table.
inline void collect_numbers(const json& j, std::vector<double>& out) {
  if (j.is_number()) out.push_back(j.get<double>());
  if (j.is_array() || j.is_object())
    for (const auto& e : j) collect_numbers(e, out);
}

inline Matrix choice_table(const json& j, const ChoiceCaseModel& m, const std::string& where) {
  if (j.is_array()) {
    auto t = matrix(j, where);
    if (t.rows() != m.choice_count() || t.cols() != m.result_count())
      throw CaseFileError(where + " must have one row per choice and one column per result");
    return t;
  }
  if (!j.is_object()) throw CaseFileError(where + " must be an array or a choice -> result -> number object");
  Matrix t(m.choice_count(), m.result_count());
  std::vector<std::vector<bool>> set(m.choice_count(), std::vector<bool>(m.result_count(), false));
  for (const auto& [c, row] : j.items()) {
    const auto ci = index_in(m.choices, c, where);
    if (!row.is_object()) throw CaseFileError(where + "." + c + " must be a result -> number object");
    for (const auto& [r, x] : row.items()) {
      const auto ri = index_in(m.results, r, where + "." + c);
      t(ci, ri) = number(x, where + "." + c + "." + r);
      set[ci][ri] = true;
    }
  }
  for (std::size_t c = 0; c < m.choice_count(); ++c)
    for (std::size_t r = 0; r < m.result_count(); ++r)
      if (!set[c][r]) throw CaseFileError(where + " has no entry for " + pair_label(m, c, r));
  return t;
}

inline std::vector<DiscreteDistribution> conditionals(const json& j, const ChoiceCaseModel& m,
                                                      const std::string& where) {
  if (!j.is_object()) throw CaseFileError(where + " must be a choice -> distribution object");
  std::vector<std::optional<DiscreteDistribution>> laws(m.choice_count());
  for (const auto& [c, law] : j.items())
    laws[index_in(m.choices, c, where)] = distribution(law, m.results, where + "." + c);
  std::vector<DiscreteDistribution> out;
  for (std::size_t c = 0; c < laws.size(); ++c) {
    if (!laws[c]) throw CaseFileError(where + " has no law for choice '" + m.choices[c] + "'");
    out.push_back(*laws[c]);
  }
  return out;
}

inline ChoiceCaseModel choice_block(const json& j, const MoneyMap& money_map, const std::string& where,
                                    bool main, std::optional<Presumption>* presumption) {
  if (main)
    check_keys(j, where,
               {"choices", "results", "duty", "values", "result_money", "counterfactual_choice",
                "counterfactual_results", "factual_results", "factual_choice", "factual_result",
                "factual_choice_law", "result_coupling", "presumption"});
  else
    check_keys(j, where,
               {"choices", "results", "duty", "values", "result_money", "counterfactual_choice",
                "counterfactual_results", "factual_results", "factual_choice", "factual_result",
                "factual_choice_law", "result_coupling"});
  ChoiceCaseModel m;
  m.money = money_map;
  m.choices = unique_labels(need(j, "choices", where), where + ".choices");
  m.results = unique_labels(need(j, "results", where), where + ".results");
  const auto& duty = need(j, "duty", where);
  if (!duty.is_array()) throw CaseFileError(where + ".duty must be an array of choices");
  for (const auto& d : duty) m.duty_set.push_back(index_in(m.choices, d, where + ".duty"));
  std::sort(m.duty_set.begin(), m.duty_set.end());
  if (std::adjacent_find(m.duty_set.begin(), m.duty_set.end()) != m.duty_set.end())
    throw CaseFileError(where + ".duty lists a choice twice");

  if (j.contains("values") == j.contains("result_money"))
    throw CaseFileError(where + " needs exactly one of 'values' or 'result_money'");
  if (j.contains("values")) {
    m.value = choice_table(j.at("values"), m, where + ".values");
  } else {
    m.value = choice_table(j.at("result_money"), m, where + ".result_money");
    for (std::size_t c = 0; c < m.choice_count(); ++c)
      for (std::size_t r = 0; r < m.result_count(); ++r) m.value(c, r) = money_map.value(m.value(c, r));
  }
  if (j.contains("counterfactual_choice"))
    m.counterfactual_choice = distribution(j.at("counterfactual_choice"), m.choices, where + ".counterfactual_choice");
  m.result_given_choice_cf = conditionals(need(j, "counterfactual_results", where), m, where + ".counterfactual_results");
  m.result_given_choice_f = conditionals(need(j, "factual_results", where), m, where + ".factual_results");
  m.factual_choice = index_in(m.choices, need(j, "factual_choice", where), where + ".factual_choice");
  m.factual_result = index_in(m.results, need(j, "factual_result", where), where + ".factual_result");
  if (j.contains("factual_choice_law"))
    m.factual_choice_law = distribution(j.at("factual_choice_law"), m.choices, where + ".factual_choice_law");
  if (j.contains("result_coupling")) {
    const auto& list = j.at("result_coupling");
    if (!list.is_array()) throw CaseFileError(where + ".result_coupling must be an array of matrices");
    std::vector<Matrix> q;
    for (const auto& x : list) q.push_back(matrix(x, where + ".result_coupling entry"));
    m.result_coupling = std::move(q);
  }
  if (j.contains("presumption")) {
    const auto p = text(j.at("presumption"), where + ".presumption");
    if (p == "it-cp") *presumption = Presumption::it_cp;
    else if (p == "ii-cp") *presumption = Presumption::ii_cp;
    else throw CaseFileError(where + ".presumption must be it-cp or ii-cp, got '" + p + "'");
  }
  validate_choice_case(m);
  return m;
}

inline std::vector<std::string> flat_labels(const CaseFile& f) {
  if (f.model) return f.model->space.labels;
  std::vector<std::string> out;
  for (std::size_t c = 0; c < f.choice->choice_count(); ++c)
    for (std::size_t r = 0; r < f.choice->result_count(); ++r) out.push_back(pair_label(*f.choice, c, r));
  return out;
}

inline json money_json(const MoneyMap& m) {
  json j;
  switch (m.kind()) {
    case MoneyMap::Kind::identity:
      j = {{"kind", "identity"}};
      break;
    case MoneyMap::Kind::inverse_utility:
      j = {{"kind", "crra"}, {"theta", m.curve().theta}};
      break;
    case MoneyMap::Kind::tabulated: {
      json pts = json::array();
      for (const auto& p : m.points()) pts.push_back({p.value, p.money});
      j = {{"kind", "tabulated"}, {"points", pts}};
      break;
    }
  }
  if (!m.anchors().empty()) {
    json amounts = json::array();
    for (const auto& a : m.anchors()) amounts.push_back(a.money);
    j["anchors"] = amounts;
  }
  return j;
}

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline json choice_json(const ChoiceCaseModel& m, std::optional<Presumption> presumption) {
  json j;
  j["choices"] = m.choices;
  j["results"] = m.results;
  json duty = json::array();
  for (std::size_t d : m.duty_set) duty.push_back(m.choices[d]);
  j["duty"] = duty;
  j["values"] = matrix_json(m.value);
  if (m.counterfactual_choice) j["counterfactual_choice"] = m.counterfactual_choice->weights;
  json cf, f;
  for (std::size_t c = 0; c < m.choice_count(); ++c) {
    cf[m.choices[c]] = m.result_given_choice_cf[c].weights;
    f[m.choices[c]] = m.result_given_choice_f[c].weights;
  }
  j["counterfactual_results"] = cf;
  j["factual_results"] = f;
  j["factual_choice"] = m.choices[m.factual_choice];
  j["factual_result"] = m.results[m.factual_result];
  if (m.factual_choice_law) j["factual_choice_law"] = m.factual_choice_law->weights;
  if (m.result_coupling) {
    json q = json::array();
    for (const auto& x : *m.result_coupling) q.push_back(matrix_json(x));
    j["result_coupling"] = q;
  }
  if (presumption) j["presumption"] = std::string(to_string(*presumption));
  return j;
}

}  // namespace detail

inline CaseFile parse_case(const nlohmann::json& j) {
  using detail::need;
  detail::check_keys(j, "case file",
                     {"name", "notes", "money", "partition", "outcomes", "counterfactual", "factual",
                      "observed", "evidence", "published", "choice", "dual"});
  CaseFile f;
  if (j.contains("name")) f.name = detail::text(j.at("name"), "name");
  if (j.contains("notes")) f.notes = detail::strings(j.at("notes"), "notes");
  if (j.contains("money")) f.money = detail::money(j.at("money"));

  if (j.contains("choice")) {
    for (const char* k : {"outcomes", "counterfactual", "factual", "observed", "evidence", "published"})
      if (j.contains(k)) throw CaseFileError(std::string("'") + k + "' does not apply to a choice case");
    std::vector<double> amounts;
    for (const char* block : {"choice", "dual"})
      if (j.contains(block) && j.at(block).is_object() && j.at(block).contains("result_money"))
        detail::collect_numbers(j.at(block).at("result_money"), amounts);
    try {
      f.money = f.money.anchored_at(amounts);
    } catch (const std::logic_error& e) {
      throw CaseFileError(std::string("result_money: ") + e.what());
    }
    f.choice = detail::choice_block(j.at("choice"), f.money, "choice", true, &f.presumption);
    if (j.contains("dual")) {
      std::optional<Presumption> unused;
      f.dual = detail::choice_block(j.at("dual"), f.money, "dual", false, &unused);
    }
  } else {
    if (j.contains("dual")) throw CaseFileError("'dual' requires a 'choice' block");
    CaseModel m;
    m.money = f.money;
    const auto& outcomes = need(j, "outcomes", "case file");
    if (!outcomes.is_array()) throw CaseFileError("outcomes must be an array of {label, value}");
    for (const auto& o : outcomes) {
      detail::check_keys(o, "outcome", {"label", "value"});
      m.space.labels.push_back(detail::text(need(o, "label", "outcome"), "outcome label"));
      m.space.values.push_back(detail::number(need(o, "value", "outcome"), "outcome value"));
    }
    detail::unique_labels(nlohmann::json(m.space.labels), "outcomes");
    m.counterfactual = detail::distribution(need(j, "counterfactual", "case file"), m.space.labels, "counterfactual");
    m.factual = detail::distribution(need(j, "factual", "case file"), m.space.labels, "factual");
    if (j.contains("observed")) m.factual_observed = detail::index_in(m.space.labels, j.at("observed"), "observed");
    m = validate_case(std::move(m));
    for (const char* k : {"evidence", "published"}) {
      if (!j.contains(k)) continue;
      auto joint = detail::coupling(j.at(k), m, k);
      auto issues = coupling_issues(m, joint);
      if (!issues.empty()) {
        for (auto& s : issues) s = std::string(k) + ": " + s;
        throw ValidationError(std::move(issues));
      }
      (std::string(k) == "evidence" ? f.evidence : f.published) = std::move(joint);
    }
    f.model = std::move(m);
  }

  if (j.contains("partition")) {
    const auto& p = j.at("partition");
    if (!p.is_array()) throw CaseFileError("partition must be an array of label arrays");
    const auto labels = detail::flat_labels(f);
    std::vector<std::vector<std::string>> blocks;
    for (const auto& b : p) {
      blocks.push_back(detail::strings(b, "partition block"));
      for (const auto& l : blocks.back())
        if (std::find(labels.begin(), labels.end(), l) == labels.end())
          throw CaseFileError("partition names unknown outcome '" + l + "'");
    }
    f.partition = std::move(blocks);
  }
  return f;
}

inline CaseFile parse_case_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CaseFileError(std::string("not valid JSON: ") + e.what());
  }
  try {
    return parse_case(j);
  } catch (const nlohmann::json::exception& e) {
    throw CaseFileError(e.what());
  } catch (const std::logic_error& e) {
    throw CaseFileError(e.what());
  }
}

inline CaseFile load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseFileError("cannot read case file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_case_text(buf.str());
}

inline nlohmann::json to_json(const CaseFile& f) {
  nlohmann::json j;
  if (!f.name.empty()) j["name"] = f.name;
  if (!f.notes.empty()) j["notes"] = f.notes;
  j["money"] = detail::money_json(f.money);
  if (f.model) {
    const auto& m = *f.model;
    j["outcomes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < m.space.size(); ++i)
      j["outcomes"].push_back({{"label", m.space.labels[i]}, {"value", m.space.values[i]}});
    j["counterfactual"] = m.counterfactual.weights;
    j["factual"] = m.factual.weights;
    if (m.factual_observed) j["observed"] = m.space.labels[*m.factual_observed];
    if (f.evidence) j["evidence"] = {{"matrix", detail::matrix_json(*f.evidence)}};
    if (f.published) j["published"] = {{"matrix", detail::matrix_json(*f.published)}};
  }
  if (f.choice) j["choice"] = detail::choice_json(*f.choice, f.presumption);
  if (f.dual) j["dual"] = detail::choice_json(*f.dual, std::nullopt);
  if (f.partition) j["partition"] = *f.partition;
  return j;
}

inline std::string serialize_case(const CaseFile& f) { return to_json(f).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Evaluation

inline std::optional<Blocks> partition_blocks(const CaseFile& f) {
  if (!f.partition) return std::nullopt;
  const auto labels = detail::flat_labels(f);
  Blocks blocks;
  for (const auto& b : *f.partition) {
    blocks.emplace_back();
    for (const auto& l : b)
      blocks.back().push_back(std::find(labels.begin(), labels.end(), l) - labels.begin());
  }
  return blocks;
}

// Choice model with the file's presumption applied.
inline ChoiceCaseModel resolved_choice(const CaseFile& f) {
  if (!f.choice) throw ConfigurationError("case has no choice block");
  if (!f.presumption) return *f.choice;
  return *f.presumption == Presumption::it_cp ? presume_choice_it_cp(*f.choice) : presume_choice_ii_cp(*f.choice);
}

inline CompensationSchedule evaluate_case(const CaseFile& f, const PolicyCombo& combo) {
  const auto custom = partition_blocks(f);
  if (f.is_choice()) return evaluate_choice_policy(resolved_choice(f), combo, custom);
  if (combo.info == InfoRestriction::custom && !custom)
    throw ConfigurationError("custom information restriction requires a 'partition' in the case file");
  const auto& joint = combo.connection == Connection::published_table ? f.published : f.evidence;
  if (!joint && (combo.connection == Connection::evidence || combo.connection == Connection::published_table))
    throw ConfigurationError(std::string(to_string(combo.connection)) + " needs '" +
                             (combo.connection == Connection::evidence ? "evidence" : "published") +
                             "' in the case file");
  auto s = evaluate_policy(*f.model, combo, joint, custom);
  if (combo.connection == Connection::least_divergence && f.published) {
    auto as_published = combo;
    as_published.connection = Connection::published_table;
    const auto p = evaluate_policy(*f.model, as_published, f.published, custom);
    bool same = true;
    for (std::size_t e = 0; e < s.entries.size(); ++e)
      same = same && std::abs(s.entries[e].compensation - p.entries[e].compensation) <= 1e-9;
    if (!same) {
      const double optimal = transport_cost(least_divergence_coupling(*f.model));
      const double printed = transport_cost(evidence_coupling(*f.model, *f.published));
      s.flags.push_back("least-divergence schedule differs from the published coupling's schedule (transport cost " +
                        format_short(optimal) + " vs " + format_short(printed) + ")");
    }
  }
  return s;
}

// Label of the observed factual outcome, if the file names one.
inline std::optional<std::string> observed_label(const CaseFile& f) {
  if (f.choice) return pair_label(*f.choice, f.choice->factual_choice, f.choice->factual_result);
  if (f.model && f.model->factual_observed) return f.model->space.labels[*f.model->factual_observed];
  return std::nullopt;
}

}  // namespace lostchance
