#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "ebb/rational.hpp"

namespace ebb {

// The library runs the same game in two numeric lanes: exact rationals for
// enumeration and certificate checks, doubles for Monte Carlo. value_cast
// moves exact parameters into whichever lane a ledger lives in.
template <class V>
V value_cast(const Rational& r) {
  if constexpr (std::is_same_v<V, Rational>) {
    return r;
  } else {
    return static_cast<V>(to_double(r));
  }
}

template <class V>
V value_abs(const V& v) {
  return v < V(0) ? V(-v) : v;
}

// One coin toss, +1 or -1.
class Outcome {
 public:
  explicit Outcome(int v) : v_(v) {
    if (v != 1 && v != -1) throw std::invalid_argument("Outcome: value must be +1 or -1");
  }
  static Outcome heads() { return Outcome(1); }
  static Outcome tails() { return Outcome(-1); }
  int value() const { return v_; }
  bool operator==(const Outcome& o) const = default;

 private:
  int v_;
};

using Path = std::vector<Outcome>;

// "-1,+1,-1" -> Path. Tokens must be +1/1/-1.
inline Path parse_path(std::string_view text) {
  Path path;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    std::string_view tok = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                            : comma - pos);
    size_t b = tok.find_first_not_of(" \t");
    size_t e = tok.find_last_not_of(" \t");
    if (b == std::string_view::npos) {
      if (comma == std::string_view::npos && path.empty()) break;  // empty path
      throw std::invalid_argument("parse_path: empty token");
    }
    tok = tok.substr(b, e - b + 1);
    if (tok == "+1" || tok == "1")
      path.push_back(Outcome::heads());
    else if (tok == "-1")
      path.push_back(Outcome::tails());
    else
      throw std::invalid_argument("parse_path: bad token '" + std::string(tok) + "'");
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return path;
}

// Compact rendering, heads as '+', tails as '-'.
inline std::string format_path(const Path& path) {
  std::string s;
  s.reserve(path.size());
  for (const Outcome& x : path) s.push_back(x.value() > 0 ? '+' : '-');
  return s.empty() ? "(empty)" : s;
}

// A round's decision: borrow this much before the toss, then bet this signed
// fraction of everything at the table on heads.
template <class V>
struct BetDecision {
  V borrow{0};
  V fraction{0};
};

// Per-round bonus b_t >= 0 on top of fair double-or-nothing odds. b == 0 is
// the fair game; b > 0 means every correctly guessed dollar pays 2+2b, and a
// 50-50 split of a dollar over both sides pays 1+b risk-free.
class PayoffSchedule {
 public:
  PayoffSchedule() = default;

  static PayoffSchedule flat(Rational bonus) {
    if (bonus < 0) throw std::invalid_argument("PayoffSchedule: bonus must be >= 0");
    PayoffSchedule s;
    s.flat_ = std::move(bonus);
    return s;
  }

  static PayoffSchedule per_round(std::vector<Rational> bonuses) {
    for (const Rational& b : bonuses)
      if (b < 0) throw std::invalid_argument("PayoffSchedule: bonus must be >= 0");
    PayoffSchedule s;
    s.per_round_ = std::move(bonuses);
    return s;
  }

  // Bonus for round t >= 1; rounds past the explicit list get the flat value.
  const Rational& bonus(size_t round) const {
    if (round >= 1 && round <= per_round_.size()) return per_round_[round - 1];
    return flat_;
  }

  bool fair() const {
    if (flat_ != 0) return false;
    for (const Rational& b : per_round_)
      if (b != 0) return false;
    return true;
  }

 private:
  std::vector<Rational> per_round_;
  Rational flat_{0};
};

// Aligned per-time history of one play-through. Index t of each series is the
// state after round t; index 0 is the initial state (gross 1, liabilities 0).
// The per-round inputs (outcome, decision, bonus) are kept so that the ledger
// is self-describing: attachments and serializers replay from it.
//
// Optional series:
//   sub_liabilities / sub_net     weighted liabilities (weights eta_t >= 1)
//   compound_liabilities           interest-bearing liabilities
//   adj_gross / adj_net / adj_liabilities
//                                  the compound triple divided by the
//                                  risk-free growth factor prod(1+b_i)
template <class V>
class Ledger {
 public:
  Ledger() : gross_{V(1)}, liabilities_{V(0)}, net_{V(1)} {}

  size_t rounds() const { return outcomes_.size(); }

  const std::vector<V>& gross() const { return gross_; }
  const std::vector<V>& liabilities() const { return liabilities_; }
  const std::vector<V>& net() const { return net_; }

  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const std::vector<BetDecision<V>>& decisions() const { return decisions_; }
  const std::vector<V>& bonuses() const { return bonuses_; }

  bool has_sub_liabilities() const { return !sub_liabilities_.empty(); }
  bool has_compound() const { return !compound_liabilities_.empty(); }

  const std::vector<V>& sub_liabilities() const {
    require(has_sub_liabilities(), "sub-liabilities not tracked");
    return sub_liabilities_;
  }
  const std::vector<V>& sub_net() const {
    require(has_sub_liabilities(), "sub-liabilities not tracked");
    return sub_net_;
  }
  const std::vector<V>& compound_liabilities() const {
    require(has_compound(), "compound liabilities not tracked");
    return compound_liabilities_;
  }
  const std::vector<V>& adj_gross() const {
    require(has_compound(), "compound liabilities not tracked");
    return adj_gross_;
  }
  const std::vector<V>& adj_net() const {
    require(has_compound(), "compound liabilities not tracked");
    return adj_net_;
  }
  const std::vector<V>& adj_liabilities() const {
    require(has_compound(), "compound liabilities not tracked");
    return adj_liabilities_;
  }

  // Starts an optional series at time 0; only possible before any round.
  void enable_sub_liabilities() {
    if (rounds() > 0)
      throw std::logic_error("Ledger: sub-liabilities must be tracked from round 1");
    if (sub_liabilities_.empty()) {
      sub_liabilities_.push_back(V(0));
      sub_net_.push_back(V(1));
    }
  }
  void enable_compound() {
    if (rounds() > 0)
      throw std::logic_error("Ledger: compound liabilities must be tracked from round 1");
    if (compound_liabilities_.empty()) {
      compound_liabilities_.push_back(V(0));
      adj_gross_.push_back(V(1));
      adj_net_.push_back(V(1));
      adj_liabilities_.push_back(V(0));
      numeraire_.push_back(V(1));
    }
  }

  // Applies round rounds()+1 in place:
  //   gross_t = (gross_{t-1} + borrow) * (1 + bonus) * (1 + fraction * X)
  //   liab_t  = liab_{t-1} + borrow
  // Rejects |fraction| > 1, borrow < -gross_{t-1} and bonus < 0; under these
  // preconditions gross wealth stays >= 0 on every path.
  //
  // `eta` extends the sub-liability series by eta * borrow (eta >= 1), and
  // `compound` extends the interest-bearing series; either must be supplied
  // from the first round onward or not at all.
  void apply(const BetDecision<V>& d, Outcome x, const V& bonus = V(0),
             const std::optional<V>& eta = std::nullopt, bool compound = false) {
    const V& w_prev = gross_.back();
    if (value_abs(d.fraction) > V(1))
      throw std::invalid_argument("apply: |fraction| > 1 (over-bet)");
    if (d.borrow < -w_prev)
      throw std::invalid_argument("apply: borrow < -gross (over-repayment)");
    if (bonus < V(0)) throw std::invalid_argument("apply: bonus < 0");
    if (eta && *eta < V(1)) throw std::invalid_argument("apply: eta < 1");

    const size_t t = rounds();  // state index before this round
    if (eta) {
      if (t == 0) enable_sub_liabilities();
      if (sub_liabilities_.size() != t + 1)
        throw std::logic_error("apply: sub-liabilities must be tracked from round 1");
    } else if (has_sub_liabilities()) {
      throw std::logic_error("apply: sub-liability weight missing for tracked ledger");
    }
    if (compound) {
      if (t == 0) enable_compound();
      if (compound_liabilities_.size() != t + 1)
        throw std::logic_error("apply: compound liabilities must be tracked from round 1");
    } else if (has_compound()) {
      throw std::logic_error("apply: compound tracking missing for tracked ledger");
    }

    const V at_table = w_prev + d.borrow;
    const V one{1};
    const V odds = x.value() > 0 ? V(one + d.fraction) : V(one - d.fraction);
    const V w = at_table * (one + bonus) * odds;
    const V liab = liabilities_.back() + d.borrow;

    gross_.push_back(w);
    liabilities_.push_back(liab);
    net_.push_back(w - liab);

    if (d.borrow < V(0)) all_borrows_nonneg_ = false;
    if (eta) {
      const V sub = sub_liabilities_.back() + *eta * d.borrow;
      // weighted liabilities dominate plain ones while no borrow was negative
      if (all_borrows_nonneg_ && sub < liab)
        throw std::logic_error("apply: sub-liabilities fell below liabilities");
      sub_liabilities_.push_back(sub);
      sub_net_.push_back(w - sub);
    }
    if (compound) {
      const V comp = (one + bonus) * (compound_liabilities_.back() + d.borrow);
      const V numeraire = numeraire_.back() * (one + bonus);
      compound_liabilities_.push_back(comp);
      numeraire_.push_back(numeraire);
      adj_gross_.push_back(w / numeraire);
      adj_liabilities_.push_back(comp / numeraire);
      adj_net_.push_back((w - comp) / numeraire);
    }

    outcomes_.push_back(x);
    decisions_.push_back(d);
    bonuses_.push_back(bonus);
  }

  // Rolls the ledger back to a prefix of `round_count` rounds.
  void truncate(size_t round_count) {
    if (round_count > rounds()) throw std::invalid_argument("truncate: beyond current length");
    const size_t n = round_count + 1;
    gross_.resize(n);
    liabilities_.resize(n);
    net_.resize(n);
    if (has_sub_liabilities()) {
      sub_liabilities_.resize(n);
      sub_net_.resize(n);
    }
    if (has_compound()) {
      compound_liabilities_.resize(n);
      adj_gross_.resize(n);
      adj_net_.resize(n);
      adj_liabilities_.resize(n);
      numeraire_.resize(n);
    }
    outcomes_.erase(outcomes_.begin() + static_cast<ptrdiff_t>(round_count), outcomes_.end());
    decisions_.resize(round_count);
    bonuses_.resize(round_count);
    all_borrows_nonneg_ = true;
    for (const BetDecision<V>& d : decisions_)
      if (d.borrow < V(0)) all_borrows_nonneg_ = false;
  }

 private:
  static void require(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("Ledger: ") + what);
  }

  std::vector<V> gross_, liabilities_, net_;
  std::vector<V> sub_liabilities_, sub_net_;
  std::vector<V> compound_liabilities_, adj_gross_, adj_net_, adj_liabilities_, numeraire_;
  std::vector<Outcome> outcomes_;
  std::vector<BetDecision<V>> decisions_;
  std::vector<V> bonuses_;
  bool all_borrows_nonneg_ = true;
};

// Pure single-round evolution.
template <class V>
Ledger<V> step(Ledger<V> ledger, const BetDecision<V>& d, Outcome x, const V& bonus = V(0)) {
  ledger.apply(d, x, bonus);
  return ledger;
}

// A strategy is a pure function of the strict past: the callback sees the
// ledger holding rounds 1..t-1 and emits the decision for round t. This makes
// predictability structural rather than something to audit after the fact.
template <class V>
struct Strategy {
  std::string name;
  std::function<BetDecision<V>(const Ledger<V>&)> decide;
};

// A bounded stopping rule. stop() is asked "stop now?" on the ledger prefix
// holding the first t rounds, so the decision at time t sees exactly
// X_1..X_t. The rule always stops at `bound` regardless; a null stop() is a
// fixed-time rule.
template <class V>
struct StoppingRule {
  std::string id;
  size_t bound = 0;
  std::function<bool(const Ledger<V>&)> stop;

  static StoppingRule fixed_time(size_t t) {
    return StoppingRule{"fixed:" + std::to_string(t), t, nullptr};
  }

  // First time >= from with stop() true, else bound. The ledger must cover
  // the rule's bound.
  size_t stop_time(const Ledger<V>& full, size_t from = 0) const {
    if (full.rounds() < bound)
      throw std::invalid_argument("stop_time: ledger shorter than the rule's bound");
    if (!stop) return bound;
    Ledger<V> prefix;
    for (size_t t = 0; t <= bound; ++t) {
      if (t > 0)
        prefix.apply(full.decisions()[t - 1], full.outcomes()[t - 1], full.bonuses()[t - 1]);
      if (t >= from && t < bound && stop(prefix)) return t;
    }
    return bound;
  }
};

// Plays a strategy along a fixed outcome path. Deterministic; errors from
// individual rounds are re-thrown annotated with the round number.
template <class V>
Ledger<V> run_game(const Strategy<V>& strategy, const Path& path,
                   const PayoffSchedule& schedule = {}) {
  Ledger<V> ledger;
  for (size_t t = 1; t <= path.size(); ++t) {
    BetDecision<V> d = strategy.decide(ledger);
    try {
      ledger.apply(d, path[t - 1], value_cast<V>(schedule.bonus(t)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("round " + std::to_string(t) + ": " + e.what());
    }
  }
  return ledger;
}

// Predictable weights eta_t >= 1 for the sub-liability series; evaluated on
// the strict past like a strategy.
template <class V>
struct EtaWeights {
  std::string name;
  std::function<V(const Ledger<V>&)> weight;

  static EtaWeights unit() {
    return EtaWeights{"unit", [](const Ledger<V>&) { return V(1); }};
  }
};

namespace detail {

// Replays a finished ledger from its recorded inputs, turning on the
// requested optional series.
template <class V>
Ledger<V> replay(const Ledger<V>& in, const EtaWeights<V>* eta, bool compound) {
  Ledger<V> out;
  if (eta) out.enable_sub_liabilities();
  if (compound) out.enable_compound();
  for (size_t t = 1; t <= in.rounds(); ++t) {
    std::optional<V> w;
    if (eta) w = eta->weight(out);
    out.apply(in.decisions()[t - 1], in.outcomes()[t - 1], in.bonuses()[t - 1], w, compound);
  }
  return out;
}

}  // namespace detail

// Returns a copy of the ledger with sub-liabilities L~_t = sum eta_i*borrow_i
// and sub-net = gross - L~ attached. Weights are evaluated predictably on
// replayed prefixes; any eta < 1 is rejected.
template <class V>
Ledger<V> attach_sub_liabilities(const Ledger<V>& ledger, const EtaWeights<V>& weights) {
  return detail::replay(ledger, &weights, ledger.has_compound());
}

// Returns a copy with the interest-bearing liability series
// L_t = (1+b_t)(L_{t-1} + borrow_t) and the numeraire-adjusted triple
// (gross, net, liabilities) / prod(1+b_i) attached. Attach this before
// sub-liabilities: the eta weights are not recoverable from a ledger.
template <class V>
Ledger<V> attach_compound_liabilities(const Ledger<V>& ledger) {
  if (ledger.has_sub_liabilities())
    throw std::invalid_argument(
        "attach_compound_liabilities: attach compound series before sub-liabilities");
  return detail::replay<V>(ledger, nullptr, true);
}

}  // namespace ebb
