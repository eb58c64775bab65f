#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ebb/evidence.hpp"
#include "ebb/game.hpp"
#include "ebb/random.hpp"
#include "ebb/rational.hpp"

namespace ebb {

// Borrow `borrow` and stake `fraction` of the table every round.
template <class V>
Strategy<V> constant_strategy(const Rational& fraction, const Rational& borrow) {
  if (rational_abs(fraction) > 1)
    throw std::invalid_argument("constant_strategy: |fraction| > 1");
  const V f = value_cast<V>(fraction);
  const V b = value_cast<V>(borrow);
  return Strategy<V>{
      "constant:lambda=" + format_rational(fraction) + ",beta=" + format_rational(borrow),
      [f, b](const Ledger<V>& past) {
        BetDecision<V> d{b, f};
        // borrowing below -gross is inadmissible; repay everything instead
        if (d.borrow < -past.gross().back()) d.borrow = -past.gross().back();
        return d;
      }};
}

template <class V>
Strategy<V> idle_strategy() {
  return Strategy<V>{"idle", [](const Ledger<V>&) { return BetDecision<V>{}; }};
}

// Stake nothing, borrow a fixed amount: in the fair game this is inert, under
// bonus odds it is the pure arbitrage play (the untouched table still grows
// by the risk-free factor 1+b every round).
template <class V>
Strategy<V> arbitrage_strategy(const Rational& borrow) {
  const V b = value_cast<V>(borrow);
  return Strategy<V>{"arbitrage:beta=" + format_rational(borrow),
                     [b](const Ledger<V>&) { return BetDecision<V>{b, V(0)}; }};
}

// Wraps a strategy so that the worst-case net wealth after each round stays
// at or above `floor`. If the base decision violates the per-round
// constraint, the borrow is cut to the largest admissible amount (the
// constraint is monotone in the borrow, so cutting the borrow alone restores
// it whenever any decision at this fraction can). If no decision can satisfy
// the constraint the round is sat out.
template <class V>
Strategy<V> net_floor_guard(Strategy<V> base, const Rational& floor) {
  if (floor >= 1) throw std::invalid_argument("net_floor_guard: floor must be < 1");
  const V f = value_cast<V>(floor);
  auto base_decide = base.decide;
  return Strategy<V>{
      "guard:nmin=" + format_rational(floor) + "(" + base.name + ")",
      [base_decide, f](const Ledger<V>& past) {
        const V& w = past.gross().back();
        const V& l = past.liabilities().back();
        BetDecision<V> d = base_decide(past);
        if (net_floor_constraint(w, l, d.borrow, d.fraction, f)) return d;
        const V stake = value_abs(d.fraction);
        if (stake > V(0)) {
          const V max_borrow = (w * (V(1) - stake) - l - f) / stake;
          if (max_borrow >= -w) {
            d.borrow = std::min(d.borrow, max_borrow);
            if (net_floor_constraint(w, l, d.borrow, d.fraction, f)) return d;
          }
        }
        return BetDecision<V>{};  // floor unreachable this round: sit out
      }};
}

// Deterministic pseudorandom admissible strategy: every decision is a pure
// hash of (seed, round, outcome prefix), so replays agree bit for bit and
// predictability is structural. Fractions have denominator 8, borrows
// denominator 4; borrows are clamped at -gross.
template <class V>
Strategy<V> random_strategy(uint64_t seed, bool nonnegative_borrows) {
  // decision tables for numerator -8..8 over 8 (fractions) and -6..8 over 4
  // (borrows); shared across calls so the per-node work is two hashes
  static const auto fractions = [] {
    std::vector<V> t;
    for (int n = -8; n <= 8; ++n) t.push_back(V(n) / V(8));
    return t;
  }();
  static const auto borrows = [] {
    std::vector<V> t;
    for (int n = -6; n <= 8; ++n) t.push_back(V(n) / V(4));
    return t;
  }();
  return Strategy<V>{
      "random:seed=" + std::to_string(seed) + ",nonneg=" + (nonnegative_borrows ? "1" : "0"),
      [seed, nonnegative_borrows](const Ledger<V>& past) {
        uint64_t bits = 1;  // sentinel keeps different prefix lengths distinct
        for (const Outcome& x : past.outcomes()) bits = (bits << 1) | (x.value() > 0 ? 1u : 0u);
        const uint64_t h = mix64(seed ^ mix64(bits));
        BetDecision<V> d;
        d.fraction = fractions[h % 17];
        d.borrow = nonnegative_borrows ? borrows[6 + (h >> 32) % 9] : borrows[(h >> 32) % 15];
        if (d.borrow < -past.gross().back()) d.borrow = -past.gross().back();
        return d;
      }};
}

// Weights that make borrowing right after a losing toss count double-or-more
// against the borrower: eta_t = 2 - X_{t-1} (1 after heads, 3 after tails),
// first round unweighted.
template <class V>
EtaWeights<V> loss_penalty_weights() {
  return EtaWeights<V>{"loss_penalty", [](const Ledger<V>& past) {
                         if (past.rounds() == 0) return V(1);
                         return V(2 - past.outcomes().back().value());
                       }};
}

// ---------------------------------------------------------------------------
// bet-and-save
// ---------------------------------------------------------------------------

// Plan of save times and per-period borrows. Rule n closes period n: the
// period ends at the first time past the previous save time where the rule
// fires, and at the rule's bound regardless. Bounds must be strictly
// increasing so the save times are too.
template <class V>
struct SaveSchedule {
  std::vector<StoppingRule<V>> save_rules;
  std::vector<Rational> borrows;

  SaveSchedule(std::vector<StoppingRule<V>> rules, std::vector<Rational> amounts)
      : save_rules(std::move(rules)), borrows(std::move(amounts)) {
    if (save_rules.empty() || save_rules.size() != borrows.size())
      throw std::invalid_argument("SaveSchedule: need one rule per borrow");
    size_t prev = 0;
    for (size_t n = 0; n < save_rules.size(); ++n) {
      if (save_rules[n].bound <= prev || (n == 0 && save_rules[n].bound < 1))
        throw std::invalid_argument("SaveSchedule: bounds must be strictly increasing");
      prev = save_rules[n].bound;
      if (borrows[n] <= 0) throw std::invalid_argument("SaveSchedule: borrows must be > 0");
    }
  }

  static SaveSchedule fixed(const std::vector<size_t>& times, std::vector<Rational> amounts) {
    std::vector<StoppingRule<V>> rules;
    rules.reserve(times.size());
    for (size_t t : times) rules.push_back(StoppingRule<V>::fixed_time(t));
    return SaveSchedule(std::move(rules), std::move(amounts));
  }

  size_t periods() const { return borrows.size(); }

  Rational total_liability() const {
    Rational sum(0);
    for (const Rational& b : borrows) sum += b;
    return sum;
  }

  size_t last_bound() const { return save_rules.back().bound; }
};

// Where a prefix sits in the save plan.
template <class V>
struct SavePoint {
  size_t period = 0;          // current period index; == periods() when done
  size_t last_save_time = 0;  // tau_period
  V savings{1};               // gross wealth at the last save time
  std::vector<size_t> save_times;  // resolved so far
};

template <class V>
SavePoint<V> resolve_save_point(const Ledger<V>& prefix, const SaveSchedule<V>& schedule) {
  SavePoint<V> at;
  Ledger<V> replay;
  for (size_t u = 1; u <= prefix.rounds(); ++u) {
    replay.apply(prefix.decisions()[u - 1], prefix.outcomes()[u - 1], prefix.bonuses()[u - 1]);
    if (at.period < schedule.periods()) {
      const StoppingRule<V>& rule = schedule.save_rules[at.period];
      const bool fires = (rule.stop && rule.stop(replay)) || u >= rule.bound;
      if (u > at.last_save_time && fires) {
        at.period += 1;
        at.last_save_time = u;
        at.savings = replay.gross().back();
        at.save_times.push_back(u);
      }
    }
  }
  return at;
}

// Inner bet: signed fraction of the current period's tranche, in [-1, 1].
template <class V>
using InnerBets = std::function<V(const Ledger<V>&, size_t period)>;

// The bet-and-save strategy: borrow borrows[n] in the first round of period
// n, never touch the wealth saved at the last save time, and bet only the
// tranche above it. Saved wealth is protected structurally: the staked
// fraction of the table is scaled so that exactly the tranche is at risk,
// hence gross wealth never drops below the savings level within a period.
// After the last period the strategy sits out.
template <class V>
Strategy<V> bet_and_save(SaveSchedule<V> schedule, InnerBets<V> bets,
                         std::string bets_name = "custom") {
  std::string name = "betsave:periods=" + std::to_string(schedule.periods()) +
                     ",L=" + format_rational(schedule.total_liability()) + ",bets=" + bets_name;
  return Strategy<V>{std::move(name),
                     [schedule, bets](const Ledger<V>& past) {
                       const SavePoint<V> at = resolve_save_point(past, schedule);
                       if (at.period >= schedule.periods()) return BetDecision<V>{};
                       const size_t t = past.rounds() + 1;
                       BetDecision<V> d;
                       if (t == at.last_save_time + 1)
                         d.borrow = value_cast<V>(schedule.borrows[at.period]);
                       const V table = past.gross().back() + d.borrow;
                       const V tranche = table - at.savings;
                       if (tranche > V(0)) {
                         V mu = bets(past, at.period);
                         if (value_abs(mu) > V(1))
                           throw std::invalid_argument("bet_and_save: inner bet outside [-1,1]");
                         d.fraction = mu * tranche / table;
                       }
                       return d;
                     }};
}

// Per-period evidence of a finished bet-and-save ledger:
//   period value   E_n = (gross at save n+1 - gross at save n) / borrow_n
//   combined       E   = borrow-weighted average of the E_n
//   net based      E'  = (net at last save - (1 - L)) / L
// The three agree path by path; the identity is re-derived here and enforced.
struct PeriodEvidence {
  std::vector<Rational> period_values;
  Rational combined{0};
  Rational net_based{0};
  Rational total_liability{0};
  std::vector<size_t> save_times;
};

inline PeriodEvidence period_e_values(const Ledger<Rational>& ledger,
                                      const SaveSchedule<Rational>& schedule) {
  const SavePoint<Rational> at = resolve_save_point(ledger, schedule);
  if (at.period < schedule.periods())
    throw std::invalid_argument("period_e_values: ledger ends before the last save time");

  PeriodEvidence out;
  out.save_times = at.save_times;
  out.total_liability = schedule.total_liability();

  Rational weighted(0);
  size_t prev_time = 0;
  for (size_t n = 0; n < schedule.periods(); ++n) {
    const size_t save_time = at.save_times[n];
    const Rational& start = ledger.gross()[prev_time];
    const Rational& end = ledger.gross()[save_time];
    const Rational value = (end - start) / schedule.borrows[n];
    weighted += schedule.borrows[n] * value;
    out.period_values.push_back(value);
    prev_time = save_time;
  }
  out.combined = weighted / out.total_liability;

  const size_t last = at.save_times.back();
  const Rational floor = Rational(1) - out.total_liability;
  out.net_based = (ledger.net()[last] - floor) / (Rational(1) - floor);

  const Rational direct = (ledger.gross()[last] - 1) / out.total_liability;
  if (out.combined != direct || out.net_based != direct)
    throw std::logic_error("period_e_values: averaging identity violated");
  return out;
}

// ---------------------------------------------------------------------------
// strategy specs
// ---------------------------------------------------------------------------

namespace detail {

inline std::map<std::string, std::string> parse_kv(std::string_view text) {
  std::map<std::string, std::string> kv;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    std::string_view item =
        text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw std::invalid_argument("strategy spec: expected key=value, got '" + std::string(item) +
                                  "'");
    kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return kv;
}

inline std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t sep = text.find(';', pos);
    out.push_back(parse_rational(
        text.substr(pos, sep == std::string::npos ? std::string::npos : sep - pos)));
    if (sep == std::string::npos) break;
    pos = sep + 1;
  }
  return out;
}

inline std::vector<size_t> parse_size_list(const std::string& text) {
  std::vector<size_t> out;
  for (const Rational& r : parse_rational_list(text)) {
    if (denominator(r) != 1 || r < 0)
      throw std::invalid_argument("strategy spec: expected nonnegative integers in '" + text +
                                  "'");
    out.push_back(numerator(r).convert_to<size_t>());
  }
  return out;
}

}  // namespace detail

template <class V>
struct ParsedStrategy {
  Strategy<V> strategy;
  // arbitrage specs may carry their own flat bonus (key b)
  std::optional<PayoffSchedule> schedule;
};

// Spec grammar: name[:key=value{,key=value}]. Names and keys:
//   idle
//   constant   lambda, beta
//   guard      lambda, beta, nmin            (floor-guard over a constant base)
//   arbitrage  beta [, b]                    (b sets a flat bonus schedule)
//   betsave    saves=2;4  borrows=1;1  mu    (fixed save times, constant inner bet)
//   random     seed [, nonneg]
// All numbers are exact rationals ("1/2"); decimals are rejected.
template <class V>
ParsedStrategy<V> parse_strategy(std::string_view spec) {
  const size_t colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  auto kv = colon == std::string_view::npos
                ? std::map<std::string, std::string>{}
                : detail::parse_kv(spec.substr(colon + 1));
  auto take = [&kv](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto done = [&kv, &name] {
    if (!kv.empty())
      throw std::invalid_argument("strategy spec '" + name + "': unknown key '" +
                                  kv.begin()->first + "'");
  };

  ParsedStrategy<V> out{idle_strategy<V>(), std::nullopt};
  if (name == "idle") {
    done();
  } else if (name == "constant") {
    const Rational lambda = parse_rational(take("lambda").value_or("0"));
    const Rational beta = parse_rational(take("beta").value_or("0"));
    done();
    out.strategy = constant_strategy<V>(lambda, beta);
  } else if (name == "guard") {
    const Rational lambda = parse_rational(take("lambda").value_or("0"));
    const Rational beta = parse_rational(take("beta").value_or("0"));
    const Rational floor = parse_rational(take("nmin").value_or("0"));
    done();
    out.strategy = net_floor_guard(constant_strategy<V>(lambda, beta), floor);
  } else if (name == "arbitrage") {
    const Rational beta = parse_rational(take("beta").value_or("0"));
    const auto bonus = take("b");
    done();
    out.strategy = arbitrage_strategy<V>(beta);
    if (bonus) out.schedule = PayoffSchedule::flat(parse_rational(*bonus));
  } else if (name == "betsave") {
    const auto saves = take("saves");
    const auto borrows = take("borrows");
    if (!saves || !borrows)
      throw std::invalid_argument("strategy spec 'betsave': saves and borrows are required");
    const Rational mu = parse_rational(take("mu").value_or("1"));
    if (rational_abs(mu) > 1)
      throw std::invalid_argument("strategy spec 'betsave': |mu| > 1");
    done();
    auto schedule = SaveSchedule<V>::fixed(detail::parse_size_list(*saves),
                                           detail::parse_rational_list(*borrows));
    const V mu_v = value_cast<V>(mu);
    out.strategy = bet_and_save<V>(
        std::move(schedule), [mu_v](const Ledger<V>&, size_t) { return mu_v; },
        "mu=" + format_rational(mu));
  } else if (name == "random") {
    const auto seed_text = take("seed").value_or("1");
    const auto nonneg = take("nonneg").value_or("0");
    done();
    out.strategy =
        random_strategy<V>(std::stoull(seed_text), nonneg != "0" && nonneg != "false");
  } else {
    throw std::invalid_argument("unknown strategy '" + name + "'");
  }
  return out;
}

// Eta-weight specs for the command line: "unit" or "losspenalty".
template <class V>
EtaWeights<V> parse_eta(std::string_view spec) {
  if (spec == "unit") return EtaWeights<V>::unit();
  if (spec == "losspenalty") return loss_penalty_weights<V>();
  throw std::invalid_argument("unknown eta weights '" + std::string(spec) + "'");
}

}  // namespace ebb
