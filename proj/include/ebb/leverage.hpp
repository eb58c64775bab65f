#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ebb/rational.hpp"

namespace ebb {

// A one-shot bet with finite support: payoff values with their probabilities
// under the null measure P and an alternative measure Q. Values are kept
// sorted and distinct; points carrying no mass under either measure are
// dropped. Q may place mass outside the P-support — the evidence functional
// then reports an unbounded instance rather than a value.
struct DiscreteBet {
  std::vector<Rational> values;
  std::vector<Rational> p_weights;
  std::vector<Rational> q_weights;

  static DiscreteBet make(std::vector<Rational> vals, std::vector<Rational> p,
                          std::vector<Rational> q) {
    if (vals.empty() || vals.size() != p.size() || vals.size() != q.size())
      throw std::invalid_argument("DiscreteBet: need aligned values/p/q");
    Rational p_sum(0), q_sum(0);
    for (size_t i = 0; i < vals.size(); ++i) {
      if (p[i] < 0 || q[i] < 0) throw std::invalid_argument("DiscreteBet: negative weight");
      p_sum += p[i];
      q_sum += q[i];
    }
    if (p_sum != 1 || q_sum != 1)
      throw std::invalid_argument("DiscreteBet: weights must sum to one exactly");

    std::vector<size_t> order(vals.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&vals](size_t a, size_t b) { return vals[a] < vals[b]; });

    DiscreteBet bet;
    for (size_t idx : order) {
      if (p[idx] == 0 && q[idx] == 0) continue;
      if (!bet.values.empty() && bet.values.back() == vals[idx]) {
        bet.p_weights.back() += p[idx];
        bet.q_weights.back() += q[idx];
      } else {
        bet.values.push_back(vals[idx]);
        bet.p_weights.push_back(p[idx]);
        bet.q_weights.push_back(q[idx]);
      }
    }
    return bet;
  }

  size_t size() const { return values.size(); }

  Rational p_mean() const {
    Rational m(0);
    for (size_t i = 0; i < size(); ++i) m += p_weights[i] * values[i];
    return m;
  }

  Rational q_mean() const {
    Rational m(0);
    for (size_t i = 0; i < size(); ++i) m += q_weights[i] * values[i];
    return m;
  }
};

// Payoff of borrowing `borrow` and staking 1+borrow on the same bet:
// v -> (1+borrow) v - borrow. Order reverses when the multiplier is negative.
inline DiscreteBet leverage_map(const DiscreteBet& bet, const Rational& borrow) {
  if (borrow == -1) throw std::invalid_argument("leverage_map: borrow -1 collapses the bet");
  std::vector<Rational> vals;
  vals.reserve(bet.size());
  const Rational m = Rational(1) + borrow;
  for (const Rational& v : bet.values) vals.push_back(m * v - borrow);
  return DiscreteBet::make(std::move(vals), bet.p_weights, bet.q_weights);
}

// Excess mean and variance under P, exact; the ratio itself is generally
// irrational, so invariance statements should use squared().
struct SharpeRatio {
  Rational excess_mean;
  Rational variance;

  Rational squared() const { return excess_mean * excess_mean / variance; }
  double value() const {
    const double num = to_double(excess_mean);
    return num / std::sqrt(to_double(variance));
  }
};

inline SharpeRatio sharpe(const DiscreteBet& bet) {
  const Rational mean = bet.p_mean();
  Rational variance(0);
  for (size_t i = 0; i < bet.size(); ++i) {
    const Rational d = bet.values[i] - mean;
    variance += bet.p_weights[i] * d * d;
  }
  if (variance == 0) throw std::domain_error("sharpe: constant payoff under P");
  return SharpeRatio{mean - 1, variance};
}

struct EvidenceFunctionalResult {
  bool bounded = true;
  std::string unbounded_reason;

  Rational value{0};  // sup over affine standardizations of E_Q
  Rational scale{0};  // argmax a
  Rational shift{0};  // argmax b
  bool negative_scale_branch = false;

  // same optimum restricted to scale >= 0, shift >= 0
  Rational restricted_value{0};
  Rational restricted_scale{0};
  Rational restricted_shift{0};
  bool restricted_differs = false;
};

namespace detail {

struct HalfPlane {  // cv * a + cb * b <= 1
  Rational cv, cb;
};

struct BranchOptimum {
  bool feasible = false;
  Rational value{0}, a{0}, b{0};
};

// Maximizes mu*a + b over the half-planes plus the branch sign constraint
// (sign > 0: a >= 0; sign < 0: a <= 0; extra_b_floor adds b >= 0). The
// feasible set is pointed whenever two or more constraint slopes differ, so
// the optimum sits at the intersection of two active lines; all pairs are
// enumerated in exact arithmetic.
inline BranchOptimum solve_branch(const std::vector<HalfPlane>& planes, const Rational& mu,
                                  int sign, bool b_floor) {
  // candidate lines: the constraints, a = 0, and optionally b = 0
  struct Line {
    Rational ca, cb, rhs;
  };
  std::vector<Line> lines;
  for (const HalfPlane& h : planes) lines.push_back({h.cv, h.cb, Rational(1)});
  lines.push_back({Rational(1), Rational(0), Rational(0)});  // a = 0
  if (b_floor) lines.push_back({Rational(0), Rational(1), Rational(0)});  // b = 0

  auto feasible = [&](const Rational& a, const Rational& b) {
    if (sign > 0 && a < 0) return false;
    if (sign < 0 && a > 0) return false;
    if (b_floor && b < 0) return false;
    for (const HalfPlane& h : planes)
      if (h.cv * a + h.cb * b > 1) return false;
    return true;
  };

  BranchOptimum best;
  auto consider = [&](const Rational& a, const Rational& b) {
    if (!feasible(a, b)) return;
    const Rational v = mu * a + b;
    if (!best.feasible || v > best.value) {
      best.feasible = true;
      best.value = v;
      best.a = a;
      best.b = b;
    }
  };

  consider(Rational(0), Rational(0));  // always feasible anchor
  for (size_t i = 0; i < lines.size(); ++i) {
    for (size_t j = i + 1; j < lines.size(); ++j) {
      const Rational det = lines[i].ca * lines[j].cb - lines[j].ca * lines[i].cb;
      if (det == 0) continue;
      const Rational a = (lines[i].rhs * lines[j].cb - lines[j].rhs * lines[i].cb) / det;
      const Rational b = (lines[i].ca * lines[j].rhs - lines[j].ca * lines[i].rhs) / det;
      consider(a, b);
    }
  }
  return best;
}

}  // namespace detail

// The standardized-evidence value of a bet: the largest expectation under Q
// that any affine transform a*Y + b can have while its P-tail stays below
// 1/x at every positive level. For finite support the continuum of tail
// constraints collapses to one constraint per support point (the tail of a
// discrete variable only jumps there), with upper tails on the a >= 0 branch
// and lower tails on the a <= 0 branch; each branch is then an exact
// two-variable linear program solved by vertex enumeration.
//
// Always >= 1 (a = 0, b = 1 is feasible). Unbounded exactly when Q rewards
// values beyond the P-support range; the flag reports it instead of a value.
inline EvidenceFunctionalResult evidence_functional(const DiscreteBet& bet) {
  EvidenceFunctionalResult out;
  const Rational mu = bet.q_mean();

  // P-support range
  std::optional<Rational> lo, hi;
  for (size_t i = 0; i < bet.size(); ++i) {
    if (bet.p_weights[i] == 0) continue;
    if (!lo) lo = bet.values[i];
    hi = bet.values[i];
  }
  if (!lo) throw std::invalid_argument("evidence_functional: P carries no mass");
  if (mu > *hi) {
    out.bounded = false;
    out.unbounded_reason = "improving ray on the positive branch: E_Q above the P-support range";
    return out;
  }
  if (mu < *lo) {
    out.bounded = false;
    out.unbounded_reason = "improving ray on the negative branch: E_Q below the P-support range";
    return out;
  }

  // tails at P-support points
  std::vector<detail::HalfPlane> upper, lower;
  Rational cum(0);
  for (size_t i = 0; i < bet.size(); ++i) {
    cum += bet.p_weights[i];
    if (bet.p_weights[i] > 0) lower.push_back({cum * bet.values[i], cum});
  }
  cum = 0;
  for (size_t i = bet.size(); i-- > 0;) {
    cum += bet.p_weights[i];
    if (bet.p_weights[i] > 0) upper.push_back({cum * bet.values[i], cum});
  }

  const detail::BranchOptimum pos = detail::solve_branch(upper, mu, +1, false);
  const detail::BranchOptimum neg = detail::solve_branch(lower, mu, -1, false);
  if (!pos.feasible && !neg.feasible)
    throw std::logic_error("evidence_functional: no feasible point found");
  if (!neg.feasible || (pos.feasible && pos.value >= neg.value)) {
    out.value = pos.value;
    out.scale = pos.a;
    out.shift = pos.b;
  } else {
    out.value = neg.value;
    out.scale = neg.a;
    out.shift = neg.b;
    out.negative_scale_branch = true;
  }

  const detail::BranchOptimum restricted = detail::solve_branch(upper, mu, +1, true);
  out.restricted_value = restricted.value;
  out.restricted_scale = restricted.a;
  out.restricted_shift = restricted.b;
  out.restricted_differs = restricted.value != out.value;
  return out;
}

// Independent audit of the LP: a plain grid search over (a, b), feasibility
// checked straight from the tail definition at the jump points of a*Y + b.
// The feasible set is one convex polyhedron per sign of a (the ordering of
// the jump points flips with the sign), so each sign gets its own
// coarse-to-fine funnel; refining a single global best could chase the
// wrong branch. Used by tests and the verify suites to corroborate vertex
// enumeration.
inline double grid_search_evidence(const DiscreteBet& bet, double box = 64.0,
                                   double fine = 1e-3) {
  std::vector<double> vals, p;
  for (size_t i = 0; i < bet.size(); ++i) {
    if (bet.p_weights[i] == 0) continue;
    vals.push_back(to_double(bet.values[i]));
    p.push_back(to_double(bet.p_weights[i]));
  }
  const double mu = to_double(bet.q_mean());

  auto feasible = [&](double a, double b) {
    for (size_t i = 0; i < vals.size(); ++i) {
      const double z = a * vals[i] + b;
      if (z <= 0) continue;
      double tail = 0;
      for (size_t j = 0; j < vals.size(); ++j)
        if (a * vals[j] + b >= z - 1e-12) tail += p[j];
      if (tail * z > 1.0 + 1e-9) return false;
    }
    return true;
  };

  auto branch = [&](double a_min, double a_max) {
    double best = -1e300, best_a = (a_min + a_max) / 2, best_b = 0;
    auto scan = [&](double a_lo, double a_hi, double b_lo, double b_hi, double step) {
      a_lo = std::max(a_lo, a_min);
      a_hi = std::min(a_hi, a_max);
      for (double a = a_lo; a <= a_hi + step / 2; a += step) {
        for (double b = b_lo; b <= b_hi + step / 2; b += step) {
          if (!feasible(a, b)) continue;
          const double v = mu * a + b;
          if (v > best) {
            best = v;
            best_a = a;
            best_b = b;
          }
        }
      }
    };
    scan(a_min, a_max, -box, box, box / 128.0);
    double window = box / 32.0;
    scan(best_a - window, best_a + window, best_b - window, best_b + window, window / 128.0);
    window = window / 32.0;
    scan(best_a - window, best_a + window, best_b - window, best_b + window, fine);
    // the optimum sits at a constraint vertex; one sub-resolution pass lets
    // the grid enter even an acute feasible wedge near it
    window = 24.0 * fine;
    scan(best_a - window, best_a + window, best_b - window, best_b + window, fine / 10.0);
    return best;
  };
  return std::max(branch(0.0, box), branch(-box, 0.0));
}

}  // namespace ebb
