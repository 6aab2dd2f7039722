#pragma once

// Outcomes, values, utility curves and money maps: the primitive facts a
// trier of fact establishes before any compensation can be computed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lostchance {

inline constexpr double kNormalizationTolerance = 1e-12;

// Collects every problem found while checking a model; what() joins them.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& s : issues) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> issues_;
};

// A policy or case is missing something it needs (e.g. evidence for E-C).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutcomeSpace {
  std::vector<std::string> labels;
  std::vector<double> values;

  std::size_t size() const noexcept { return labels.size(); }

  std::optional<std::size_t> index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels.begin());
  }

  std::size_t require_index(const std::string& label) const {
    if (auto i = index_of(label)) return *i;
    throw std::invalid_argument("unknown outcome label '" + label + "'");
  }

  friend bool operator==(const OutcomeSpace&, const OutcomeSpace&) = default;
};

struct DiscreteDistribution {
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }

  double total() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > 0.0) out.push_back(i);
    return out;
  }

  static DiscreteDistribution point_mass(std::size_t n, std::size_t at) {
    DiscreteDistribution d{std::vector<double>(n, 0.0)};
    d.weights.at(at) = 1.0;
    return d;
  }

  static DiscreteDistribution uniform(std::size_t n) {
    return DiscreteDistribution{std::vector<double>(n, 1.0 / static_cast<double>(n))};
  }

  friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;
};

// Issues with a single distribution, prefixed by `name`.
inline std::vector<std::string> distribution_issues(const DiscreteDistribution& d,
                                                    const std::string& name) {
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!std::isfinite(d[i]) || d[i] < 0.0)
      issues.push_back(name + ": weight " + std::to_string(i) + " is negative or not finite");
  }
  const double total = d.total();
  if (std::isfinite(total) && std::abs(total - 1.0) > kNormalizationTolerance)
    issues.push_back(name + ": normalization failed, weights sum to " + std::to_string(total));
  return issues;
}

inline double expected_value(const std::vector<double>& values, const DiscreteDistribution& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += d[i] * values[i];
  return s;
}

// Constant-relative-risk-aversion utility of money, V(m) = (1 - m^(1-theta)) / (theta - 1).
// theta = 0 is risk neutral (V = m - 1), theta = 1 is the log limit.
struct UtilityCurve {
  double theta = 0.0;

  friend bool operator==(const UtilityCurve&, const UtilityCurve&) = default;
};

inline constexpr double kLogBranchWidth = 1e-9;

namespace detail {
inline void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("risk-aversion parameter theta must lie in [0, 1]");
}
}  // namespace detail

inline double utility_value(const UtilityCurve& curve, double money) {
  detail::check_theta(curve.theta);
  if (!(money > 0.0) || !std::isfinite(money))
    throw std::domain_error("utility is defined only for positive finite money");
  const double r = 1.0 - curve.theta;
  if (r == 1.0) return money - 1.0;
  if (std::abs(r) < kLogBranchWidth) return std::log(money);
  // expm1 keeps full precision when r * log(m) is small
  return std::expm1(r * std::log(money)) / r;
}

inline double money_equivalent(const UtilityCurve& curve, double v) {
  detail::check_theta(curve.theta);
  if (!std::isfinite(v)) throw std::domain_error("value must be finite");
  const double r = 1.0 - curve.theta;
  if (r == 1.0) {
    if (!(v > -1.0)) throw std::domain_error("value lies outside the range of the utility curve");
    return v + 1.0;
  }
  if (std::abs(r) < kLogBranchWidth) return std::exp(v);
  // range of V is (-1/r, +inf)
  const double base = r * v;
  if (!(base > -1.0)) throw std::domain_error("value lies outside the range of the utility curve");
  return std::exp(std::log1p(base) / r);
}

// M: value -> money. Strictly increasing and invertible on its domain.
class MoneyMap {
 public:
  enum class Kind { identity, inverse_utility, tabulated };

  struct Point {
    double value;
    double money;
    friend bool operator==(const Point&, const Point&) = default;
  };

  static MoneyMap identity() { return MoneyMap(IdentityTag{}); }

  static MoneyMap inverse_of(UtilityCurve curve) {
    detail::check_theta(curve.theta);
    return MoneyMap(curve);
  }

  // Monotone table of (value, money) points; linear interpolation between them.
  static MoneyMap tabulated(std::vector<Point> points) {
    if (points.size() < 2) throw std::invalid_argument("tabulated money map needs at least two points");
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (!(points[i].value > points[i - 1].value) || !(points[i].money > points[i - 1].money))
        throw std::invalid_argument("tabulated money map must be strictly increasing in value and money");
    }
    return MoneyMap(std::move(points));
  }

  // Same map, but exact at the given money amounts: M(V(m)) returns m itself, so
  // values derived from stated money amounts price back without rounding drift.
  MoneyMap anchored_at(const std::vector<double>& amounts) const {
    MoneyMap out = *this;
    for (double m : amounts) {
      const Point p{value(m), m};
      const auto at = std::lower_bound(out.anchors_.begin(), out.anchors_.end(), p,
                                       [](const Point& a, const Point& b) { return a.money < b.money; });
      if (at != out.anchors_.end() && at->money == m) continue;
      out.anchors_.insert(at, p);
    }
    return out;
  }

  const std::vector<Point>& anchors() const noexcept { return anchors_; }

  Kind kind() const noexcept {
    if (std::holds_alternative<IdentityTag>(rep_)) return Kind::identity;
    if (std::holds_alternative<UtilityCurve>(rep_)) return Kind::inverse_utility;
    return Kind::tabulated;
  }

  const UtilityCurve& curve() const { return std::get<UtilityCurve>(rep_); }
  const std::vector<Point>& points() const { return std::get<std::vector<Point>>(rep_); }

  // M(v)
  double money(double v) const {
    for (const auto& a : anchors_)
      if (a.value == v) return a.money;
    switch (kind()) {
      case Kind::identity:
        return v;
      case Kind::inverse_utility:
        return money_equivalent(curve(), v);
      case Kind::tabulated:
        return interpolate(points(), v, &Point::value, &Point::money);
    }
    return v;
  }

  // V(m) = M^{-1}(m)
  double value(double m) const {
    for (const auto& a : anchors_)
      if (a.money == m) return a.value;
    switch (kind()) {
      case Kind::identity:
        return m;
      case Kind::inverse_utility:
        return utility_value(curve(), m);
      case Kind::tabulated:
        return interpolate(points(), m, &Point::money, &Point::value);
    }
    return m;
  }

  std::string describe() const {
    switch (kind()) {
      case Kind::identity:
        return "identity";
      case Kind::inverse_utility:
        return "crra-inverse(theta=" + std::to_string(curve().theta) + ")";
      case Kind::tabulated:
        return "tabulated(" + std::to_string(points().size()) + " points)";
    }
    return {};
  }

  friend bool operator==(const MoneyMap&, const MoneyMap&) = default;

 private:
  struct IdentityTag {
    friend bool operator==(IdentityTag, IdentityTag) { return true; }
  };

  explicit MoneyMap(IdentityTag t) : rep_(t) {}
  explicit MoneyMap(UtilityCurve c) : rep_(c) {}
  explicit MoneyMap(std::vector<Point> p) : rep_(std::move(p)) {}

  static double interpolate(const std::vector<Point>& pts, double x, double Point::*from,
                            double Point::*to) {
    if (!(x >= pts.front().*from && x <= pts.back().*from))
      throw std::domain_error("argument lies outside the tabulated money map");
    auto it = std::lower_bound(pts.begin(), pts.end(), x,
                               [from](const Point& p, double v) { return p.*from < v; });
    if (it == pts.begin()) return (*it).*to;
    const Point& hi = *it;
    const Point& lo = *(it - 1);
    const double t = (x - lo.*from) / (hi.*from - lo.*from);
    return lo.*to + t * (hi.*to - lo.*to);
  }

  std::variant<IdentityTag, UtilityCurve, std::vector<Point>> rep_;
  std::vector<Point> anchors_;  // sorted by money
};

// Money that raises the victim's value from v1 to v1 + x: M(v1 + x) - M(v1).
inline double award_from_compensation(const MoneyMap& money, double v1, double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("compensation value must be non-negative");
  if (x == 0.0) return 0.0;
  return money.money(v1 + x) - money.money(v1);
}

struct CaseModel {
  OutcomeSpace space;
  DiscreteDistribution counterfactual;
  DiscreteDistribution factual;
  MoneyMap money = MoneyMap::identity();
  std::optional<std::size_t> factual_observed;

  double expected_counterfactual() const { return expected_value(space.values, counterfactual); }
  double expected_factual() const { return expected_value(space.values, factual); }
  // E[V0] - E[V1]
  double expected_loss() const { return expected_counterfactual() - expected_factual(); }

  friend bool operator==(const CaseModel&, const CaseModel&) = default;
};

inline std::vector<std::string> case_issues(const CaseModel& model) {
  std::vector<std::string> issues;
  const auto& space = model.space;
  if (space.labels.empty()) issues.push_back("outcome space is empty");
  if (space.values.size() != space.labels.size())
    issues.push_back("outcome space has " + std::to_string(space.labels.size()) + " labels but " +
                     std::to_string(space.values.size()) + " values");
  std::set<std::string> seen;
  for (const auto& label : space.labels) {
    if (label.empty()) issues.push_back("outcome label is empty");
    if (!seen.insert(label).second) issues.push_back("duplicate outcome label '" + label + "'");
  }
  for (std::size_t i = 0; i < space.values.size(); ++i)
    if (!std::isfinite(space.values[i]))
      issues.push_back("value of outcome " + std::to_string(i) + " is not finite");

  const auto check_dist = [&](const DiscreteDistribution& d, const std::string& name) {
    if (d.size() != space.size()) {
      issues.push_back(name + " distribution has " + std::to_string(d.size()) +
                       " weights for " + std::to_string(space.size()) + " outcomes");
      return;
    }
    auto more = distribution_issues(d, name);
    issues.insert(issues.end(), more.begin(), more.end());
  };
  check_dist(model.counterfactual, "counterfactual");
  check_dist(model.factual, "factual");

  if (model.factual_observed) {
    const std::size_t o = *model.factual_observed;
    if (o >= space.size()) {
      issues.push_back("observed outcome index " + std::to_string(o) + " is out of range");
    } else if (o < model.factual.size() && !(model.factual[o] > 0.0)) {
      issues.push_back("observed outcome '" + space.labels[o] + "' has zero factual probability");
    }
  }
  return issues;
}

inline CaseModel validate_case(CaseModel model) {
  auto issues = case_issues(model);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return model;
}

}  // namespace lostchance
