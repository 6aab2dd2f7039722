#pragma once

// Seeded random-instance suite driving the transport and schedule oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lostchance/choice.hpp"
#include "lostchance/coupling.hpp"
#include "lostchance/csv.hpp"
#include "lostchance/valuation.hpp"

namespace lostchance {

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  std::size_t instances = 200;
  double lambda_fault = 0.0;  // added to every solved lambda*
};

struct PropertyResult {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::string first_failure;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<PropertyResult> properties;

  bool ok() const {
    for (const auto& p : properties)
      if (p.failed > 0) return false;
    return true;
  }

  const PropertyResult* find(const std::string& name) const {
    for (const auto& p : properties)
      if (p.name == name) return &p;
    return nullptr;
  }

  std::string render() const {
    std::ostringstream out;
    out << "seed " << options.seed << ", " << options.instances << " instances";
    if (options.lambda_fault != 0.0) out << ", lambda fault " << format_short(options.lambda_fault);
    out << '\n';
    for (const auto& p : properties) {
      out << (p.failed ? "FAIL " : "ok   ") << p.name << ": " << p.passed << " passed, " << p.failed
          << " failed\n";
      if (p.failed) out << "     first failure: " << p.first_failure << '\n';
    }
    out << (ok() ? "all properties hold" : "property violations found") << '\n';
    return out.str();
  }
};

namespace detail {

class PropertyLog {
 public:
  explicit PropertyLog(std::vector<std::string> names) {
    for (auto& n : names) results_.push_back({std::move(n), 0, 0, {}});
  }

  void check(std::size_t property, bool ok, const std::function<std::string()>& describe) {
    auto& r = results_[property];
    if (ok) {
      ++r.passed;
    } else {
      if (r.failed++ == 0) r.first_failure = describe();
    }
  }

  std::vector<PropertyResult> take() { return std::move(results_); }

 private:
  std::vector<PropertyResult> results_;
};

inline DiscreteDistribution random_weights(std::mt19937_64& rng, std::size_t n, int zero_odds) {
  std::uniform_int_distribution<int> w(0, 9);
  std::uniform_int_distribution<int> z(0, zero_odds);
  std::vector<double> x(n);
  double s = 0;
  for (auto& e : x) {
    e = z(rng) == 0 ? 0.0 : 1 + w(rng);
    s += e;
  }
  if (s == 0) x[0] = s = 1;
  for (auto& e : x) e /= s;
  return {x};
}

inline CaseModel random_case(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> v(-20, 80);
  CaseModel m;
  for (std::size_t i = 0; i < n; ++i) {
    m.space.labels.push_back("o" + std::to_string(i));
    m.space.values.push_back(v(rng));
  }
  m.counterfactual = random_weights(rng, n, 5);
  m.factual = random_weights(rng, n, 5);
  return m;
}

// A random joint and the model whose marginals it induces.
inline std::pair<CaseModel, Matrix> random_joint_case(std::mt19937_64& rng, std::size_t n) {
  auto m = random_case(rng, n);
  const auto cells = random_weights(rng, n * n, 2);
  Matrix joint(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) joint(i, j) = cells[i * n + j];
  m.counterfactual.weights = joint.row_sums();
  m.factual.weights = joint.col_sums();
  return {m, joint};
}

inline ChoiceCaseModel random_choice_case(std::mt19937_64& rng, std::size_t nc, std::size_t nr) {
  std::uniform_int_distribution<int> v(0, 30);
  ChoiceCaseModel m;
  for (std::size_t c = 0; c < nc; ++c) m.choices.push_back("c" + std::to_string(c));
  for (std::size_t r = 0; r < nr; ++r) m.results.push_back("r" + std::to_string(r));
  for (std::size_t c = 0; c < nc; ++c) m.duty_set.push_back(c);
  m.value = Matrix(nc, nr);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t r = 0; r < nr; ++r) m.value(c, r) = v(rng);
  m.counterfactual_choice = random_weights(rng, nc, 4);
  for (std::size_t c = 0; c < nc; ++c) {
    m.result_given_choice_cf.push_back(random_weights(rng, nr, 4));
    m.result_given_choice_f.push_back(random_weights(rng, nr, 4));
  }
  m.factual_choice_law = random_weights(rng, nc, 4);
  m.factual_choice = m.factual_choice_law->support().front();
  m.factual_result = m.result_given_choice_f[m.factual_choice].support().front();
  return m;
}

inline double value_range(const OutcomeSpace& s) {
  const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
  return std::max(1.0, *hi - *lo);
}

// Largest |P(c0, r1 | c1) - P(c0 | c1) P(r1 | c1)| in a VK joint.
inline double vk_dependence(const ChoiceCaseModel& m, const Matrix& joint) {
  const std::size_t nc = m.choice_count(), nr = m.result_count();
  double worst = 0.0;
  for (std::size_t c1 = 0; c1 < nc; ++c1) {
    double p = 0.0;
    std::vector<double> pc0(nc, 0.0), pr1(nr, 0.0);
    Matrix both(nc, nr);
    for (std::size_t c0 = 0; c0 < nc; ++c0)
      for (std::size_t r0 = 0; r0 < nr; ++r0)
        for (std::size_t r1 = 0; r1 < nr; ++r1) {
          const double w = joint(c0 * nr + r0, c1 * nr + r1);
          p += w;
          pc0[c0] += w;
          pr1[r1] += w;
          both(c0, r1) += w;
        }
    if (p == 0.0) continue;
    for (std::size_t c0 = 0; c0 < nc; ++c0)
      for (std::size_t r1 = 0; r1 < nr; ++r1)
        worst = std::max(worst, std::abs(both(c0, r1) / p - (pc0[c0] / p) * (pr1[r1] / p)));
  }
  return worst;
}

}  // namespace detail

inline VerifyReport run_verification(const VerifyOptions& opt = {}) {
  enum Property {
    kMarginals,
    kTransportOptimal,
    kMonotone,
    kIndependenceCovariance,
    kTotalExpectation,
    kNonNegativeMeasurable,
    kClosestOptimal,
    kFixedMeanOptimal,
    kFixedMeanMean,
    kDominance,
    kExcessGap,
    kVkIndependence,
    kPresumptionIdempotent,
  };
  detail::PropertyLog log({"coupling marginals preserved", "comonotone cost equals oracle minimum",
                           "comonotone monotone rearrangement", "independence has zero covariance",
                           "gap total expectation identity", "schedules non-negative and block-constant",
                           "CC-I matches unconstrained oracle", "FM-I matches mean-constrained oracle",
                           "FM-I mean equals expected loss", "CC-I dominates FM-I pointwise",
                           "excess-gap function monotone and 1-Lipschitz",
                           "VK: factual result independent of counterfactual choice",
                           "presumptions idempotent"});
  std::mt19937_64 rng(opt.seed);

  const auto fm = [&](const GapTable& g) {
    const double target = g.expected_loss();
    if (!(target > 0.0)) return fm_indemnity(g);
    return threshold_schedule(g, std::max(0.0, solve_lambda(g, target)) + opt.lambda_fault);
  };

  for (std::size_t k = 0; k < opt.instances; ++k) {
    const std::string tag = "instance " + std::to_string(k);

    // Transport.
    {
      const auto m = detail::random_case(rng, 1 + k % 5);
      const auto ld = least_divergence_coupling(m);
      const auto ic = independence_coupling(m);
      const auto oracle = oracle_min_cost(m);
      bool marg = true;
      for (const Coupling* c : {&ld, &ic, &oracle.coupling}) {
        const auto rows = c->counterfactual_marginal();
        const auto cols = c->factual_marginal();
        for (std::size_t i = 0; i < m.space.size(); ++i)
          marg = marg && std::abs(rows[i] - m.counterfactual[i]) <= 1e-10 &&
                 std::abs(cols[i] - m.factual[i]) <= 1e-10;
      }
      log.check(kMarginals, marg, [&] { return tag; });
      const double como = transport_cost(ld);
      log.check(kTransportOptimal, std::abs(como - oracle.cost) <= 1e-9, [&] {
        return tag + ": comonotone " + format_full(como) + " vs oracle " + format_full(oracle.cost);
      });
      bool mono = true;
      const auto& v = m.space.values;
      for (std::size_t i = 0; i < ld.size(); ++i)
        for (std::size_t j = 0; j < ld.size(); ++j)
          for (std::size_t i2 = 0; i2 < ld.size(); ++i2)
            for (std::size_t j2 = 0; j2 < ld.size(); ++j2)
              if (ld(i, j) > 1e-14 && ld(i2, j2) > 1e-14 && v[i] < v[i2] && v[j] > v[j2]) mono = false;
      log.check(kMonotone, mono, [&] { return tag; });
      const double e0 = m.expected_counterfactual(), e1 = m.expected_factual();
      double cov = 0.0;
      for (std::size_t i = 0; i < ic.size(); ++i)
        for (std::size_t j = 0; j < ic.size(); ++j) cov += ic(i, j) * (v[i] - e0) * (v[j] - e1);
      log.check(kIndependenceCovariance, std::abs(cov) < 1e-10,
                [&] { return tag + ": covariance " + format_full(cov); });
    }

    // Schedules on up to four outcomes, under three kinds of coupling.
    {
      const auto [m, joint] = detail::random_joint_case(rng, 1 + k % 4);
      const double grid = 0.01 * detail::value_range(m.space);
      const double loss = m.expected_loss();
      for (const auto& c : {evidence_coupling(m, joint), least_divergence_coupling(m), independence_coupling(m)}) {
        for (auto info : {InfoRestriction::low, InfoRestriction::medium, InfoRestriction::high}) {
          const auto part = build_partition(info, selective_groups(c));
          const auto g = conditional_gap(c, part);
          log.check(kTotalExpectation, std::abs(g.expected_loss() - loss) <= 1e-10, [&] {
            return tag + ": " + format_full(g.expected_loss()) + " vs " + format_full(loss);
          });
          const auto cc = cc_indemnity(g);
          const auto f = fm(g);
          bool shape = true;
          for (const auto* s : {&cc, &f})
            for (const auto& e : s->entries) {
              shape = shape && e.compensation >= 0.0;
              for (const auto& o : s->entries)
                if (o.block == e.block) shape = shape && o.compensation == e.compensation;
            }
          log.check(kNonNegativeMeasurable, shape, [&] { return tag; });

          const auto free = oracle_best_schedule(c, part, false);
          const auto fixed = oracle_best_schedule(c, part, true);
          bool close_cc = compensation_risk(c, cc) <= free.risk + 1e-9;
          bool close_fm = compensation_risk(c, f) <= fixed.risk + 1e-9;
          bool dom = true;
          for (std::size_t e = 0; e < cc.entries.size(); ++e) {
            const auto& label = cc.entries[e].label;
            if (cc.entries[e].probability > 0.0) {
              close_cc = close_cc && std::abs(cc.entries[e].compensation - free.schedule.compensation_at(label)) <= grid;
              close_fm = close_fm && std::abs(f.entries[e].compensation - fixed.schedule.compensation_at(label)) <= grid;
            }
            dom = dom && cc.entries[e].compensation >= f.entries[e].compensation;
          }
          const std::string where = tag + " " + std::string(to_string(info));
          log.check(kClosestOptimal, close_cc, [&] { return where; });
          log.check(kFixedMeanOptimal, close_fm, [&] {
            return where + ": risk " + format_full(compensation_risk(c, f)) + " vs oracle " +
                   format_full(fixed.risk);
          });
          log.check(kDominance, dom, [&] {
            std::string d = where + ":";
            for (std::size_t e = 0; e < cc.entries.size(); ++e)
              d += " " + format_full(cc.entries[e].compensation) + "/" + format_full(f.entries[e].compensation);
            return d;
          });
          if (loss > 0.0) {
            const double mean = f.mean_compensation();
            log.check(kFixedMeanMean, std::abs(mean - loss) <= 1e-10, [&] {
              return where + ": mean " + format_full(mean) + " vs expected loss " + format_full(loss);
            });
          }
        }
      }
    }

    // Excess-gap function on a random gap table.
    {
      std::uniform_real_distribution<double> gap(-50.0, 50.0);
      const auto w = detail::random_weights(rng, 1 + k % 6, 6);
      GapTable g{{}, {}, {}};
      for (std::size_t b = 0; b < w.size(); ++b)
        if (w[b] > 0.0) g.blocks.push_back({{}, {}, w[b], gap(rng)});
      bool ok = true;
      for (int t = 0; t < 10; ++t) {
        const double l = gap(rng);
        const double eps = std::abs(gap(rng)) / 10.0;
        const double a = excess_gap(g, l), b = excess_gap(g, l + eps);
        ok = ok && b <= a + 1e-12 && a - b <= eps + 1e-12;
      }
      log.check(kExcessGap, ok, [&] { return tag; });
    }

    // Choice models.
    {
      auto m = detail::random_choice_case(rng, 2 + k % 3, 2 + k % 3);
      const double dep = detail::vk_dependence(m, vk_factorize(m));
      log.check(kVkIndependence, dep < 1e-10, [&] { return tag + ": " + format_full(dep); });
      if (k % 2) m.counterfactual_choice.reset();
      const auto it = presume_choice_it_cp(m);
      const auto ii = presume_choice_ii_cp(m);
      log.check(kPresumptionIdempotent,
                presume_choice_it_cp(it).counterfactual_choice == it.counterfactual_choice &&
                    presume_choice_ii_cp(ii).counterfactual_choice == ii.counterfactual_choice,
                [&] { return tag; });
    }
  }
  return {opt, log.take()};
}

}  // namespace lostchance
