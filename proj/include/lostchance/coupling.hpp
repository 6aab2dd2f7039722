#pragma once

// Joint laws of (counterfactual outcome, factual outcome) with fixed marginals.
// The latent connector between the two scenarios is never materialized; only
// the joint it induces is kept.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lostchance/csv.hpp"
#include "lostchance/matrix.hpp"
#include "lostchance/outcome_model.hpp"

namespace lostchance {

inline constexpr double kMarginalTolerance = 1e-10;

struct Coupling {
  OutcomeSpace space;
  Matrix joint;  // (counterfactual i, factual j)
  std::vector<std::string> notes;

  std::size_t size() const noexcept { return space.size(); }
  double operator()(std::size_t i, std::size_t j) const { return joint(i, j); }
  std::vector<double> counterfactual_marginal() const { return joint.row_sums(); }
  std::vector<double> factual_marginal() const { return joint.col_sums(); }
};

// Every way the joint fails to be a coupling of the model's marginals.
inline std::vector<std::string> coupling_issues(const CaseModel& model, const Matrix& joint) {
  std::vector<std::string> issues;
  const std::size_t n = model.space.size();
  if (joint.rows() != n || joint.cols() != n) {
    issues.push_back("coupling matrix is " + std::to_string(joint.rows()) + "x" +
                     std::to_string(joint.cols()) + " but the outcome space has " +
                     std::to_string(n) + " outcomes");
    return issues;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!std::isfinite(joint(i, j)) || joint(i, j) < 0.0)
        issues.push_back("coupling entry (" + model.space.labels[i] + ", " + model.space.labels[j] +
                         ") is negative or not finite");
  if (std::abs(joint.total() - 1.0) > kNormalizationTolerance)
    issues.push_back("coupling normalization failed, mass sums to " + std::to_string(joint.total()));
  const auto rows = joint.row_sums();
  const auto cols = joint.col_sums();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(rows[i] - model.counterfactual[i]) > kMarginalTolerance)
      issues.push_back("row " + std::to_string(i) + " (" + model.space.labels[i] +
                       ") sums to " + std::to_string(rows[i]) +
                       " but the counterfactual marginal is " + std::to_string(model.counterfactual[i]));
    if (std::abs(cols[i] - model.factual[i]) > kMarginalTolerance)
      issues.push_back("column " + std::to_string(i) + " (" + model.space.labels[i] +
                       ") sums to " + std::to_string(cols[i]) +
                       " but the factual marginal is " + std::to_string(model.factual[i]));
  }
  return issues;
}

// E-C: a joint law supplied by evidence.
inline Coupling evidence_coupling(const CaseModel& model, Matrix joint) {
  auto issues = coupling_issues(model, joint);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return Coupling{model.space, std::move(joint), {}};
}

// Expands a deterministic evidence map (counterfactual i -> factual target[i])
// into a joint matrix carrying the counterfactual mass of i.
inline Matrix joint_from_map(const CaseModel& model, const std::vector<std::size_t>& target) {
  const std::size_t n = model.space.size();
  if (target.size() != n)
    throw std::invalid_argument("deterministic map must name a factual outcome for every outcome");
  Matrix joint(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (target[i] >= n) throw std::invalid_argument("deterministic map target out of range");
    joint(i, target[i]) += model.counterfactual[i];
  }
  return joint;
}

// I-C: scenarios independent, joint is the outer product of the marginals.
inline Coupling independence_coupling(const CaseModel& model) {
  const std::size_t n = model.space.size();
  Matrix joint(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) joint(i, j) = model.counterfactual[i] * model.factual[j];
  return Coupling{model.space, std::move(joint), {}};
}

// Outcome indices ordered by value; equal values keep label order.
inline std::vector<std::size_t> value_order(const OutcomeSpace& space) {
  std::vector<std::size_t> order(space.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return space.values[a] < space.values[b]; });
  return order;
}

// Pairs equal quantiles of two laws over the same value-sorted support.
// Mass of (i, j) is the overlap of i's counterfactual quantile interval with
// j's factual quantile interval.
inline Matrix comonotone_joint(const std::vector<double>& row_weights,
                               const std::vector<double>& col_weights,
                               const std::vector<std::size_t>& row_order,
                               const std::vector<std::size_t>& col_order) {
  Matrix joint(row_weights.size(), col_weights.size());
  double row_lo = 0.0;
  std::size_t jc = 0;
  double col_lo = 0.0;
  for (std::size_t i : row_order) {
    const double row_hi = row_lo + row_weights[i];
    if (row_weights[i] > 0.0) {
      while (jc < col_order.size()) {
        const std::size_t j = col_order[jc];
        const double col_hi = col_lo + col_weights[j];
        const double overlap = std::min(row_hi, col_hi) - std::max(row_lo, col_lo);
        if (overlap > 0.0) joint(i, j) += overlap;
        if (col_hi > row_hi) break;
        col_lo = col_hi;
        ++jc;
      }
    }
    row_lo = row_hi;
  }
  return joint;
}

inline bool has_positive_mass_value_ties(const CaseModel& model) {
  const auto order = value_order(model.space);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t a = order[k - 1];
    const std::size_t b = order[k];
    if (model.space.values[a] != model.space.values[b]) continue;
    const auto massive = [&](std::size_t o) {
      return model.counterfactual[o] > 0.0 || model.factual[o] > 0.0;
    };
    if (massive(a) && massive(b)) return true;
  }
  return false;
}

inline const char* kTieOrderNote =
    "outcome values tie: the least-divergence coupling (and H-FI compensations) depend on label order";

// LD-C: the coupling minimizing E[(V0 - V1)^2] over all couplings with the
// model's marginals. For a scalar convex cost the comonotone coupling is optimal.
inline Coupling least_divergence_coupling(const CaseModel& model) {
  const auto order = value_order(model.space);
  Coupling c{model.space,
             comonotone_joint(model.counterfactual.weights, model.factual.weights, order, order),
             {}};
  if (has_positive_mass_value_ties(model)) c.notes.emplace_back(kTieOrderNote);
  return c;
}

inline double transport_cost(const Coupling& c) {
  double cost = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double d = c.space.values[i] - c.space.values[j];
      cost += c.joint(i, j) * d * d;
    }
  return cost;
}

inline constexpr std::size_t kOracleMaxOutcomes = 6;

namespace detail {
// North-west corner rule on the given row/column orderings; always a vertex
// of the transportation polytope.
inline Matrix northwest_corner(const std::vector<double>& rows, const std::vector<double>& cols,
                               const std::vector<std::size_t>& row_order,
                               const std::vector<std::size_t>& col_order) {
  Matrix joint(rows.size(), cols.size());
  std::size_t a = 0;
  std::size_t b = 0;
  double row_left = row_order.empty() ? 0.0 : rows[row_order[0]];
  double col_left = col_order.empty() ? 0.0 : cols[col_order[0]];
  while (a < row_order.size() && b < col_order.size()) {
    const double m = std::min(row_left, col_left);
    joint(row_order[a], col_order[b]) += m;
    row_left -= m;
    col_left -= m;
    if (row_left <= col_left) {
      if (++a < row_order.size()) row_left += rows[row_order[a]];
    } else {
      if (++b < col_order.size()) col_left += cols[col_order[b]];
    }
  }
  return joint;
}
}  // namespace detail

struct OracleTransport {
  Coupling coupling;
  double cost;
  std::size_t vertices_examined;
};

// Exhaustive minimum of the transport cost: every vertex of the transportation
// polytope is a north-west corner solution for some row and column ordering.
inline OracleTransport oracle_min_cost(const CaseModel& model) {
  const std::size_t n = model.space.size();
  if (n > kOracleMaxOutcomes)
    throw std::length_error("transport oracle supports at most " + std::to_string(kOracleMaxOutcomes) +
                            " outcomes, got " + std::to_string(n));
  auto rows = model.counterfactual.support();
  auto cols = model.factual.support();
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());

  OracleTransport best{Coupling{model.space, Matrix(n, n), {}},
                       std::numeric_limits<double>::infinity(), 0};
  auto row_perm = rows;
  do {
    auto col_perm = cols;
    do {
      Coupling candidate{model.space,
                         detail::northwest_corner(model.counterfactual.weights,
                                                  model.factual.weights, row_perm, col_perm),
                         {}};
      const double cost = transport_cost(candidate);
      ++best.vertices_examined;
      if (cost < best.cost) {
        best.cost = cost;
        best.coupling = std::move(candidate);
      }
    } while (std::next_permutation(col_perm.begin(), col_perm.end()));
  } while (std::next_permutation(row_perm.begin(), row_perm.end()));
  return best;
}

// Audit CSV: counterfactual label, factual label, mass (non-zero cells only).
inline void write_coupling_csv(std::ostream& out, const Coupling& c) {
  out << "counterfactual,factual,mass\n";
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      if (c.joint(i, j) != 0.0)
        out << csv_field(c.space.labels[i]) << ',' << csv_field(c.space.labels[j]) << ','
            << format_full(c.joint(i, j)) << '\n';
}

}  // namespace lostchance
