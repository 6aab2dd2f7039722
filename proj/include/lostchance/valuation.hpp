#pragma once

// Compensation valuation: information partitions, conditional gaps, and the
// closest-to-counterfactual (CC-I) and fixed-mean (FM-I) indemnity schedules.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lostchance/coupling.hpp"
#include "lostchance/csv.hpp"
#include "lostchance/matrix.hpp"
#include "lostchance/outcome_model.hpp"

namespace lostchance {

enum class InfoRestriction { low, medium, high, custom };
enum class Connection { evidence, least_divergence, independence, published_table };
enum class Indemnity { closest, fixed_mean };

inline std::string_view to_string(InfoRestriction r) {
  switch (r) {
    case InfoRestriction::low: return "L-FI";
    case InfoRestriction::medium: return "M-FI";
    case InfoRestriction::high: return "H-FI";
    case InfoRestriction::custom: return "custom";
  }
  return "?";
}

inline std::string_view to_string(Connection c) {
  switch (c) {
    case Connection::evidence: return "E-C";
    case Connection::least_divergence: return "LD-C";
    case Connection::independence: return "I-C";
    case Connection::published_table: return "published-table";
  }
  return "?";
}

inline std::string_view to_string(Indemnity i) {
  switch (i) {
    case Indemnity::closest: return "CC-I";
    case Indemnity::fixed_mean: return "FM-I";
  }
  return "?";
}

namespace detail {
inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}
}  // namespace detail

inline InfoRestriction parse_info(std::string_view s) {
  const auto t = detail::lower(s);
  if (t == "l-fi" || t == "low") return InfoRestriction::low;
  if (t == "m-fi" || t == "medium") return InfoRestriction::medium;
  if (t == "h-fi" || t == "high") return InfoRestriction::high;
  if (t == "custom") return InfoRestriction::custom;
  throw std::invalid_argument("unknown information restriction '" + std::string(s) + "'");
}

inline Connection parse_connection(std::string_view s) {
  const auto t = detail::lower(s);
  if (t == "e-c" || t == "evidence") return Connection::evidence;
  if (t == "ld-c" || t == "least-divergence") return Connection::least_divergence;
  if (t == "i-c" || t == "independence") return Connection::independence;
  if (t == "published-table" || t == "published") return Connection::published_table;
  throw std::invalid_argument("unknown connection restriction '" + std::string(s) + "'");
}

inline Indemnity parse_indemnity(std::string_view s) {
  const auto t = detail::lower(s);
  if (t == "cc-i" || t == "closest") return Indemnity::closest;
  if (t == "fm-i" || t == "fixed-mean") return Indemnity::fixed_mean;
  throw std::invalid_argument("unknown indemnity restriction '" + std::string(s) + "'");
}

struct PolicyCombo {
  InfoRestriction info = InfoRestriction::high;
  Connection connection = Connection::evidence;
  Indemnity indemnity = Indemnity::closest;

  std::string descriptor() const {
    return std::string(to_string(info)) + " " + std::string(to_string(connection)) + " " +
           std::string(to_string(indemnity));
  }

  friend bool operator==(const PolicyCombo&, const PolicyCombo&) = default;
};

// Every combination of the three standard information restrictions, the given
// connections and both indemnities.
inline std::vector<PolicyCombo> policy_grid(const std::vector<Connection>& connections) {
  std::vector<PolicyCombo> out;
  for (auto info : {InfoRestriction::low, InfoRestriction::medium, InfoRestriction::high})
    for (auto conn : connections)
      for (auto ind : {Indemnity::closest, Indemnity::fixed_mean}) out.push_back({info, conn, ind});
  return out;
}

inline std::vector<PolicyCombo> standard_policy_grid() {
  return policy_grid({Connection::evidence, Connection::least_divergence, Connection::independence});
}

// ---------------------------------------------------------------------------
// Selective compensation groups

inline double tie_tolerance(const OutcomeSpace& space) {
  double scale = 1.0;
  for (double v : space.values) scale = std::max(scale, std::abs(v));
  return 1e-12 * scale;
}

// E[V0 | O1 = j]; requires positive factual mass at j.
inline double conditional_counterfactual_value(const Coupling& c, std::size_t j) {
  double mass = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    mass += c.joint(i, j);
    weighted += c.joint(i, j) * c.space.values[i];
  }
  return weighted / mass;
}

struct SelectiveGroups {
  std::vector<std::size_t> worse_off;      // E[V0 | o] > V(o): compensable group
  std::vector<std::size_t> not_worse_off;  // E[V0 | o] <= V(o), ties included
  std::vector<std::size_t> ties;           // subset of not_worse_off with E[V0 | o] == V(o)

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> all = worse_off;
    all.insert(all.end(), not_worse_off.begin(), not_worse_off.end());
    std::sort(all.begin(), all.end());
    return all;
  }
};

// Splits the factual support by comparing each factual outcome with its
// conditional expected counterfactual value. Ties (within tie_tolerance) are
// not compensable as a group.
inline SelectiveGroups selective_groups(const Coupling& c) {
  SelectiveGroups g;
  const auto cols = c.factual_marginal();
  const double tol = tie_tolerance(c.space);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (!(cols[j] > 0.0)) continue;
    const double diff = conditional_counterfactual_value(c, j) - c.space.values[j];
    if (diff > tol) {
      g.worse_off.push_back(j);
    } else {
      g.not_worse_off.push_back(j);
      if (std::abs(diff) <= tol) g.ties.push_back(j);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Information partitions

using Blocks = std::vector<std::vector<std::size_t>>;

struct InformationPartition {
  Blocks blocks;
  InfoRestriction origin = InfoRestriction::high;
};

inline InformationPartition build_partition(InfoRestriction info, const SelectiveGroups& groups,
                                            const std::optional<Blocks>& custom = std::nullopt) {
  const auto support = groups.support();
  InformationPartition part{{}, info};
  switch (info) {
    case InfoRestriction::low:
      if (!support.empty()) part.blocks.push_back(support);
      break;
    case InfoRestriction::medium:
      if (!groups.worse_off.empty()) part.blocks.push_back(groups.worse_off);
      if (!groups.not_worse_off.empty()) part.blocks.push_back(groups.not_worse_off);
      break;
    case InfoRestriction::high:
      for (std::size_t o : support) part.blocks.push_back({o});
      break;
    case InfoRestriction::custom: {
      if (!custom) throw ConfigurationError("custom information restriction requires a partition");
      std::vector<int> hits(support.empty() ? 0 : support.back() + 1, 0);
      const auto in_support = [&](std::size_t o) {
        return std::binary_search(support.begin(), support.end(), o);
      };
      for (const auto& block : *custom) {
        std::vector<std::size_t> kept;
        for (std::size_t o : block) {
          if (!in_support(o)) continue;  // zero factual mass carries no schedule entry
          if (hits[o]++ > 0)
            throw std::invalid_argument("custom partition lists outcome " + std::to_string(o) +
                                        " in more than one block");
          kept.push_back(o);
        }
        if (!kept.empty()) part.blocks.push_back(std::move(kept));
      }
      for (std::size_t o : support)
        if (hits[o] == 0)
          throw std::invalid_argument("custom partition does not cover supported factual outcome " +
                                      std::to_string(o));
      break;
    }
  }
  return part;
}

// ---------------------------------------------------------------------------
// Conditional gaps

struct GapBlock {
  std::vector<std::size_t> outcomes;
  std::vector<double> outcome_probability;  // factual mass of each outcome
  double probability = 0.0;
  double gap = 0.0;  // E[V0 - V1 | block]
};

struct GapTable {
  OutcomeSpace space;
  std::vector<GapBlock> blocks;
  std::vector<std::string> warnings;

  // Sum over blocks of P(block) * gap; equals E[V0] - E[V1].
  double expected_loss() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.probability * b.gap;
    return s;
  }
};

inline GapTable conditional_gap(const Coupling& c, const InformationPartition& part) {
  GapTable table{c.space, {}, {}};
  for (const auto& members : part.blocks) {
    GapBlock block;
    double weighted = 0.0;
    for (std::size_t j : members) {
      double col = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) {
        col += c.joint(i, j);
        weighted += c.joint(i, j) * (c.space.values[i] - c.space.values[j]);
      }
      block.outcomes.push_back(j);
      block.outcome_probability.push_back(col);
      block.probability += col;
    }
    if (!(block.probability > 0.0)) {
      table.warnings.push_back("information block with zero probability excluded");
      continue;
    }
    block.gap = weighted / block.probability;
    table.blocks.push_back(std::move(block));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Schedules

struct ScheduleEntry {
  std::size_t outcome = 0;
  std::string label;
  double value = 0.0;        // V(o)
  double probability = 0.0;  // factual mass of o
  std::size_t block = 0;
  double compensation = 0.0;  // X(o)
  double award = 0.0;         // M(V(o) + X(o)) - M(V(o))
};

struct CompensationSchedule {
  std::string policy;
  std::vector<ScheduleEntry> entries;
  std::optional<double> lambda_star;
  std::vector<std::string> notes;  // informational
  std::vector<std::string> flags;  // computation flags (surface with --strict)

  const ScheduleEntry* find(std::string_view label) const {
    for (const auto& e : entries)
      if (e.label == label) return &e;
    return nullptr;
  }

  const ScheduleEntry& at(std::string_view label) const {
    if (const auto* e = find(label)) return *e;
    throw std::out_of_range("no schedule entry for outcome '" + std::string(label) + "'");
  }

  double compensation_at(std::string_view label) const { return at(label).compensation; }
  double award_at(std::string_view label) const { return at(label).award; }

  double mean_compensation() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.probability * e.compensation;
    return s;
  }
};

// One schedule entry per supported factual outcome, X constant on each block.
inline CompensationSchedule block_schedule(const GapTable& g, const std::vector<double>& block_values) {
  CompensationSchedule s;
  for (std::size_t b = 0; b < g.blocks.size(); ++b) {
    const auto& block = g.blocks[b];
    for (std::size_t k = 0; k < block.outcomes.size(); ++k) {
      const std::size_t o = block.outcomes[k];
      s.entries.push_back(ScheduleEntry{o, g.space.labels[o], g.space.values[o],
                                        block.outcome_probability[k], b, block_values[b], 0.0});
    }
  }
  std::sort(s.entries.begin(), s.entries.end(),
            [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.outcome < b.outcome; });
  return s;
}

// CC-I: X = max(0, E[V0 - V1 | K]).
inline CompensationSchedule cc_indemnity(const GapTable& g) {
  std::vector<double> x;
  for (const auto& b : g.blocks) x.push_back(std::max(0.0, b.gap));
  return block_schedule(g, x);
}

// f(lambda) = sum over blocks of P(block) * max(0, gap - lambda).
inline double excess_gap(const GapTable& g, double lambda) {
  double s = 0.0;
  for (const auto& b : g.blocks) s += b.probability * std::max(0.0, b.gap - lambda);
  return s;
}

// Root of f(lambda) = target. f is piecewise linear and non-increasing with
// breakpoints at the gaps, so the root is solved on the active linear piece.
inline double solve_lambda(const GapTable& g, double target) {
  if (!(target > 0.0))
    throw std::invalid_argument("fixed-mean threshold needs a positive expected loss; "
                                "a non-positive loss means zero compensation");
  std::vector<std::pair<double, double>> pieces;  // (gap, probability)
  for (const auto& b : g.blocks)
    if (b.probability > 0.0) pieces.emplace_back(b.gap, b.probability);
  if (pieces.empty()) throw std::invalid_argument("gap table has no positive-probability block");
  std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  double sum_pg = 0.0;
  double sum_p = 0.0;
  for (std::size_t m = 0; m < pieces.size(); ++m) {
    sum_pg += pieces[m].second * pieces[m].first;
    sum_p += pieces[m].second;
    const double lambda = (sum_pg - target) / sum_p;
    const double next = m + 1 < pieces.size() ? pieces[m + 1].first
                                              : -std::numeric_limits<double>::infinity();
    if (lambda >= next) return lambda;
  }
  return (sum_pg - target) / sum_p;  // unreachable: the last piece is unbounded below
}

// X = max(0, E[V0 - V1 | K] - lambda)
inline CompensationSchedule threshold_schedule(const GapTable& g, double lambda) {
  std::vector<double> x;
  for (const auto& b : g.blocks) x.push_back(std::max(0.0, b.gap - lambda));
  auto s = block_schedule(g, x);
  s.lambda_star = lambda;
  return s;
}

// FM-I: zero when E[V0 - V1] <= 0, otherwise the threshold schedule whose mean
// equals E[V0 - V1].
inline CompensationSchedule fm_indemnity(const GapTable& g) {
  const double target = g.expected_loss();
  if (!(target > 0.0)) {
    auto s = block_schedule(g, std::vector<double>(g.blocks.size(), 0.0));
    s.notes.emplace_back("expected loss is not positive: fixed-mean indemnity is zero");
    return s;
  }
  // lambda* >= 0 because f(0) >= E[gap]; the clamp removes rounding below zero.
  return threshold_schedule(g, std::max(0.0, solve_lambda(g, target)));
}

inline void price_schedule(CompensationSchedule& s, const MoneyMap& money) {
  for (auto& e : s.entries) e.award = award_from_compensation(money, e.value, e.compensation);
}

// ---------------------------------------------------------------------------
// Policy evaluation

inline Coupling make_coupling(const CaseModel& model, Connection connection,
                              const std::optional<Matrix>& evidence) {
  switch (connection) {
    case Connection::evidence:
    case Connection::published_table:
      if (!evidence)
        throw ConfigurationError(std::string(to_string(connection)) +
                                 " requires an evidence coupling (joint matrix or deterministic map)");
      return evidence_coupling(model, *evidence);
    case Connection::least_divergence:
      return least_divergence_coupling(model);
    case Connection::independence:
      return independence_coupling(model);
  }
  throw std::logic_error("unhandled connection");
}

inline CompensationSchedule evaluate_on_coupling(const CaseModel& model, const Coupling& coupling,
                                                 const PolicyCombo& combo,
                                                 const std::optional<Blocks>& custom = std::nullopt) {
  const auto groups = selective_groups(coupling);
  const auto part = build_partition(combo.info, groups, custom);
  const auto gaps = conditional_gap(coupling, part);
  auto s = combo.indemnity == Indemnity::closest ? cc_indemnity(gaps) : fm_indemnity(gaps);
  s.policy = combo.descriptor();
  s.flags.insert(s.flags.end(), coupling.notes.begin(), coupling.notes.end());
  s.notes.insert(s.notes.end(), gaps.warnings.begin(), gaps.warnings.end());
  if (!groups.ties.empty()) {
    std::string labels;
    for (std::size_t o : groups.ties) labels += (labels.empty() ? "" : ", ") + model.space.labels[o];
    s.notes.push_back("expected counterfactual value equals factual value at {" + labels +
                      "}; treated as not worse off");
  }
  price_schedule(s, model.money);
  return s;
}

// Coupling -> groups -> partition -> gaps -> indemnity -> monetary awards.
inline CompensationSchedule evaluate_policy(const CaseModel& model, const PolicyCombo& combo,
                                            const std::optional<Matrix>& evidence = std::nullopt,
                                            const std::optional<Blocks>& custom = std::nullopt) {
  const auto checked = validate_case(model);
  return evaluate_on_coupling(checked, make_coupling(checked, combo.connection, evidence), combo, custom);
}

// Schedule CSV: policy, outcome, X, award.
inline void write_schedule_csv_header(std::ostream& out) {
  out << "policy,outcome,compensation,award\n";
}

inline void write_schedule_csv_rows(std::ostream& out, const CompensationSchedule& s) {
  for (const auto& e : s.entries)
    out << csv_field(s.policy) << ',' << csv_field(e.label) << ',' << format_full(e.compensation)
        << ',' << format_full(e.award) << '\n';
}

// ---------------------------------------------------------------------------
// Brute-force oracle over block-constant schedules

// R(X) = E[(V0 - (V1 + X(O1)))^2] straight from the joint law.
inline double compensation_risk(const Coupling& c, const CompensationSchedule& s) {
  std::vector<double> x(c.size(), 0.0);
  for (const auto& e : s.entries) x[e.outcome] = e.compensation;
  double r = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double d = c.space.values[i] - (c.space.values[j] + x[j]);
      r += c.joint(i, j) * d * d;
    }
  return r;
}

inline constexpr std::size_t kOracleMaxBlocks = 4;

struct OracleSchedule {
  CompensationSchedule schedule;
  double risk = 0.0;
  double resolution = 0.0;  // final grid step
};

namespace detail {

// Per block: P, E[(V0 - V1) 1_block], E[(V0 - V1)^2 1_block]; R(X) is a
// quadratic in the block values with these coefficients.
struct RiskMoments {
  double p = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline double risk_from_moments(const std::vector<RiskMoments>& m, const std::vector<double>& x) {
  double r = 0.0;
  for (std::size_t b = 0; b < m.size(); ++b) r += m[b].d2 - 2.0 * x[b] * m[b].d1 + x[b] * x[b] * m[b].p;
  return r;
}

// Visits every point of a product grid given per-dimension (lo, step, count).
template <typename Visit>
void for_each_grid_point(const std::vector<double>& lo, const std::vector<double>& step,
                         const std::vector<std::size_t>& count, Visit&& visit) {
  const std::size_t dims = lo.size();
  std::vector<std::size_t> idx(dims, 0);
  std::vector<double> x(lo);
  while (true) {
    visit(x);
    std::size_t d = 0;
    while (d < dims) {
      if (++idx[d] < count[d]) {
        x[d] = lo[d] + static_cast<double>(idx[d]) * step[d];
        break;
      }
      idx[d] = 0;
      x[d] = lo[d];
      ++d;
    }
    if (d == dims) return;
  }
}

}  // namespace detail

// Grid search for the block-constant, non-negative X minimizing R(X),
// optionally restricted to {E[X] = E[V0 - V1]} together with X = 0.
inline OracleSchedule oracle_best_schedule(const Coupling& c, const InformationPartition& part,
                                           bool constrained) {
  if (part.blocks.size() > kOracleMaxBlocks)
    throw std::length_error("schedule oracle supports at most " + std::to_string(kOracleMaxBlocks) +
                            " blocks, got " + std::to_string(part.blocks.size()));
  std::vector<detail::RiskMoments> moments(part.blocks.size());
  double target = 0.0;
  for (std::size_t b = 0; b < part.blocks.size(); ++b)
    for (std::size_t j : part.blocks[b])
      for (std::size_t i = 0; i < c.size(); ++i) {
        const double p = c.joint(i, j);
        const double d = c.space.values[i] - c.space.values[j];
        moments[b].p += p;
        moments[b].d1 += p * d;
        moments[b].d2 += p * d * d;
        target += p * d;
      }

  const auto [vmin, vmax] = std::minmax_element(c.space.values.begin(), c.space.values.end());
  const double range = *vmax > *vmin ? *vmax - *vmin : 1.0;

  std::vector<std::size_t> live;  // blocks with positive probability
  for (std::size_t b = 0; b < moments.size(); ++b)
    if (moments[b].p > 0.0) live.push_back(b);

  std::vector<double> best(part.blocks.size(), 0.0);
  double best_risk = detail::risk_from_moments(moments, best);

  // Under the mean constraint one block is solved from the others; every live block takes a turn
  // as that pivot so optima with zero-compensation blocks sit on an axis face of the search box.
  const bool searching = !live.empty() && (!constrained || target > 0.0);
  std::vector<std::optional<std::size_t>> pivots{std::nullopt};
  if (constrained) pivots.assign(live.begin(), live.end());
  double resolution = 0.0;
  for (const auto& pivot : pivots) {
    if (!searching) break;
    std::vector<std::size_t> free_dims = live;
    if (pivot) free_dims.erase(std::find(free_dims.begin(), free_dims.end(), *pivot));

    const auto consider = [&](const std::vector<double>& free_x) {
      std::vector<double> x(part.blocks.size(), 0.0);
      for (std::size_t k = 0; k < free_dims.size(); ++k) x[free_dims[k]] = free_x[k];
      if (pivot) {
        double used = 0.0;
        for (std::size_t b : free_dims) used += moments[b].p * x[b];
        x[*pivot] = (target - used) / moments[*pivot].p;
        if (x[*pivot] < 0.0) return;
      }
      const double r = detail::risk_from_moments(moments, x);
      if (r < best_risk) {
        best_risk = r;
        best = x;
      }
    };

    if (free_dims.empty()) {
      consider({});
      continue;
    }
    // Block b ranges over [0, range], or [0, target / P(b)] under the mean constraint.
    const std::size_t dims = free_dims.size();
    constexpr std::size_t kCoarse = 26;
    std::vector<double> step(dims);
    for (std::size_t k = 0; k < dims; ++k) {
      const double hi = constrained ? std::min(range, target / moments[free_dims[k]].p) : range;
      step[k] = hi / (kCoarse - 1);
    }
    detail::for_each_grid_point(std::vector<double>(dims, 0.0), step,
                                std::vector<std::size_t>(dims, kCoarse), consider);
    // Pattern search: re-centre the window until the best point stays put, then shrink.
    for (int refine = 0; refine < 5; ++refine) {
      for (auto& s : step) s /= 5.0;
      for (int pass = 0; pass < 100; ++pass) {
        const auto before = best;
        std::vector<double> lo(dims);
        std::vector<std::size_t> count(dims);
        for (std::size_t k = 0; k < dims; ++k) {
          lo[k] = std::max(0.0, best[free_dims[k]] - 5.0 * step[k]);
          const double hi = best[free_dims[k]] + 5.0 * step[k];
          count[k] = static_cast<std::size_t>(std::floor((hi - lo[k]) / step[k] + 1e-9)) + 1;
        }
        detail::for_each_grid_point(lo, step, count, consider);
        if (best == before) break;
      }
    }
    resolution = std::max(resolution, *std::max_element(step.begin(), step.end()));
  }

  OracleSchedule out;
  GapTable shape{c.space, {}, {}};
  for (const auto& members : part.blocks) {
    GapBlock b;
    for (std::size_t j : members) {
      b.outcomes.push_back(j);
      b.outcome_probability.push_back(c.joint.col_sums()[j]);
    }
    shape.blocks.push_back(std::move(b));
  }
  out.schedule = block_schedule(shape, best);
  out.schedule.policy = constrained ? "oracle (fixed mean)" : "oracle";
  out.risk = best_risk;
  out.resolution = resolution;
  return out;
}

}  // namespace lostchance
