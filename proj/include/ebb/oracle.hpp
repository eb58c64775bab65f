#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ebb/evidence.hpp"
#include "ebb/game.hpp"
#include "ebb/random.hpp"
#include "ebb/rational.hpp"

// Exact brute-force verification: every check below enumerates all coin-toss
// paths up to the horizon and compares exact rationals. Nothing here is
// sampled except the optional stopping-rule families, whose seeds are
// recorded in the rule ids.
namespace ebb::oracle {

inline constexpr size_t kMaxExactHorizon = 20;

// All 2^T paths of length T under an i.i.d. +1/-1 coin with P(+1) = bias.
struct PathEnsemble {
  size_t horizon;
  Rational bias;

  PathEnsemble(size_t T, Rational p) : horizon(T), bias(std::move(p)) {
    if (horizon > kMaxExactHorizon)
      throw std::invalid_argument("PathEnsemble: horizon above the exact-enumeration cap");
    if (bias < 0 || bias > 1) throw std::invalid_argument("PathEnsemble: bias outside [0,1]");
  }

  Rational weight(const Path& path) const {
    Rational w(1);
    for (const Outcome& x : path) w *= x.value() > 0 ? bias : Rational(1) - bias;
    return w;
  }
};

// Process value read off a ledger prefix: the value at time t is
// proj(prefix with t rounds).
using Projection = std::function<Rational(const Ledger<Rational>&)>;

inline Projection gross_value() {
  return [](const Ledger<Rational>& l) { return l.gross().back(); };
}
inline Projection net_value() {
  return [](const Ledger<Rational>& l) { return l.net().back(); };
}
inline Projection liabilities_value() {
  return [](const Ledger<Rational>& l) { return l.liabilities().back(); };
}
inline Projection sub_net_value() {
  return [](const Ledger<Rational>& l) { return l.sub_net().back(); };
}
inline Projection sub_liabilities_value() {
  return [](const Ledger<Rational>& l) { return l.sub_liabilities().back(); };
}
inline Projection adjusted_net_value() {
  return [](const Ledger<Rational>& l) { return l.adj_net().back(); };
}
inline Projection adjusted_gross_value() {
  return [](const Ledger<Rational>& l) { return l.adj_gross().back(); };
}
inline Projection adjusted_liabilities_value() {
  return [](const Ledger<Rational>& l) { return l.adj_liabilities().back(); };
}

// Optional series maintained during a walk.
struct WalkOptions {
  const EtaWeights<Rational>* eta = nullptr;
  bool compound = false;
};

namespace detail {
inline Ledger<Rational> root_ledger(const WalkOptions& opt) {
  Ledger<Rational> ledger;
  if (opt.eta) ledger.enable_sub_liabilities();
  if (opt.compound) ledger.enable_compound();
  return ledger;
}
}  // namespace detail

// Depth-first traversal of the outcome tree, one shared ledger, push/pop per
// branch. visit(prefix, weight) runs at every node including the root; return
// false to skip the subtree. Zero-probability branches are not visited.
template <class Visit>
void walk(const Strategy<Rational>& strategy, const PayoffSchedule& schedule,
          const PathEnsemble& ensemble, Visit&& visit, const WalkOptions& opt = {}) {
  Ledger<Rational> ledger = detail::root_ledger(opt);
  const Rational up = ensemble.bias;
  const Rational down = Rational(1) - ensemble.bias;

  auto rec = [&](auto&& self, const Rational& weight) -> void {
    if (!visit(std::as_const(ledger), weight)) return;
    const size_t done = ledger.rounds();
    if (done == ensemble.horizon) return;
    const BetDecision<Rational> d = strategy.decide(ledger);
    const Rational bonus = schedule.bonus(done + 1);
    std::optional<Rational> eta;
    if (opt.eta) eta = opt.eta->weight(ledger);
    for (int side : {+1, -1}) {
      const Rational& p = side > 0 ? up : down;
      if (p == 0) continue;
      ledger.apply(d, Outcome(side), bonus, eta, opt.compound);
      self(self, weight * p);
      ledger.truncate(done);
    }
  };
  rec(rec, Rational(1));
}

// Exact expectation of a functional of the whole path.
inline Rational expectation(const std::function<Rational(const Path&)>& f,
                            const PathEnsemble& ensemble) {
  Rational sum(0);
  Path path;
  path.reserve(ensemble.horizon);
  const Rational up = ensemble.bias, down = Rational(1) - ensemble.bias;
  auto rec = [&](auto&& self, const Rational& weight) -> void {
    if (path.size() == ensemble.horizon) {
      sum += weight * f(path);
      return;
    }
    for (int side : {+1, -1}) {
      const Rational& p = side > 0 ? up : down;
      if (p == 0) continue;
      path.push_back(Outcome(side));
      self(self, weight * p);
      path.pop_back();
    }
  };
  rec(rec, Rational(1));
  return sum;
}

// Exact expectation of a ledger projection at the horizon.
inline Rational expectation(const Strategy<Rational>& strategy, const PayoffSchedule& schedule,
                            const PathEnsemble& ensemble, const Projection& proj,
                            const WalkOptions& opt = {}) {
  Rational sum(0);
  walk(
      strategy, schedule, ensemble,
      [&](const Ledger<Rational>& led, const Rational& w) {
        if (led.rounds() == ensemble.horizon) sum += w * proj(led);
        return true;
      },
      opt);
  return sum;
}

// ---------------------------------------------------------------------------
// martingale / Doob checks
// ---------------------------------------------------------------------------

struct MartingaleReport {
  enum class Verdict { Martingale, Supermartingale, Submartingale, None };

  Rational max_abs_drift{0};  // max over prefixes of |E[increment | prefix]|
  bool any_positive = false;
  bool any_negative = false;

  bool is_martingale() const { return !any_positive && !any_negative; }
  bool is_supermartingale() const { return !any_positive; }  // weak sense
  bool is_submartingale() const { return !any_negative; }    // weak sense

  Verdict verdict() const {
    if (is_martingale()) return Verdict::Martingale;
    if (is_supermartingale()) return Verdict::Supermartingale;
    if (is_submartingale()) return Verdict::Submartingale;
    return Verdict::None;
  }
};

inline const char* to_string(MartingaleReport::Verdict v) {
  using V = MartingaleReport::Verdict;
  switch (v) {
    case V::Martingale: return "martingale";
    case V::Supermartingale: return "supermartingale";
    case V::Submartingale: return "submartingale";
    case V::None: return "none";
  }
  return "?";
}

// Exact conditional drift of a projection at every prefix.
inline MartingaleReport martingale_check(const Strategy<Rational>& strategy,
                                         const PayoffSchedule& schedule,
                                         const PathEnsemble& ensemble, const Projection& proj,
                                         const WalkOptions& opt = {}) {
  MartingaleReport report;
  Ledger<Rational> ledger = detail::root_ledger(opt);
  const Rational up = ensemble.bias, down = Rational(1) - ensemble.bias;

  auto rec = [&](auto&& self) -> void {
    const size_t done = ledger.rounds();
    if (done == ensemble.horizon) return;
    const Rational here = proj(ledger);
    const BetDecision<Rational> d = strategy.decide(ledger);
    const Rational bonus = schedule.bonus(done + 1);
    std::optional<Rational> eta;
    if (opt.eta) eta = opt.eta->weight(ledger);

    Rational mean(0);
    for (int side : {+1, -1}) {
      const Rational& p = side > 0 ? up : down;
      if (p == 0) continue;
      ledger.apply(d, Outcome(side), bonus, eta, opt.compound);
      mean += p * proj(ledger);
      self(self);
      ledger.truncate(done);
    }
    const Rational drift = mean - here;
    if (drift > 0) report.any_positive = true;
    if (drift < 0) report.any_negative = true;
    if (rational_abs(drift) > report.max_abs_drift) report.max_abs_drift = rational_abs(drift);
  };
  rec(rec);
  return report;
}

struct DoobReport {
  bool liabilities_predictable = true;
  bool initial_liability_zero = true;
  MartingaleReport net;
  std::string detail;

  bool pass() const {
    return liabilities_predictable && initial_liability_zero && net.is_martingale();
  }
};

// Verifies the decomposition gross = net + liabilities: the liability series
// is predictable (equal across siblings), starts at zero, and the net series
// has exactly zero conditional drift. With `adjusted` set the same is checked
// for the numeraire-adjusted triple of the bonus game.
inline DoobReport doob_check(const Strategy<Rational>& strategy, const PayoffSchedule& schedule,
                             const PathEnsemble& ensemble, bool adjusted = false) {
  DoobReport report;
  WalkOptions opt;
  opt.compound = adjusted;
  const Projection liab = adjusted ? adjusted_liabilities_value() : liabilities_value();
  const Projection net = adjusted ? adjusted_net_value() : net_value();

  Ledger<Rational> ledger = detail::root_ledger(opt);
  if (liab(ledger) != 0) {
    report.initial_liability_zero = false;
    report.detail = "liabilities do not start at zero";
  }
  const Rational up = ensemble.bias, down = Rational(1) - ensemble.bias;

  auto rec = [&](auto&& self) -> void {
    const size_t done = ledger.rounds();
    if (done == ensemble.horizon) return;
    const Rational net_here = net(ledger);
    const BetDecision<Rational> d = strategy.decide(ledger);
    const Rational bonus = schedule.bonus(done + 1);

    Rational mean(0);
    std::optional<Rational> liab_child;
    for (int side : {+1, -1}) {
      const Rational& p = side > 0 ? up : down;
      if (p == 0) continue;
      ledger.apply(d, Outcome(side), bonus, std::nullopt, adjusted);
      const Rational l = liab(ledger);
      if (liab_child && *liab_child != l) {
        report.liabilities_predictable = false;
        if (report.detail.empty())
          report.detail = "liabilities differ across round-" + std::to_string(done + 1) +
                          " outcomes after prefix " + format_path(
                              Path(ledger.outcomes().begin(), ledger.outcomes().end() - 1));
      }
      liab_child = l;
      mean += p * net(ledger);
      self(self);
      ledger.truncate(done);
    }
    const Rational drift = mean - net_here;
    if (drift > 0) report.net.any_positive = true;
    if (drift < 0) report.net.any_negative = true;
    if (rational_abs(drift) > report.net.max_abs_drift)
      report.net.max_abs_drift = rational_abs(drift);
  };
  rec(rec);
  return report;
}

// ---------------------------------------------------------------------------
// distributions and maximal probabilities
// ---------------------------------------------------------------------------

// Exact finite distribution, values strictly increasing.
using Distribution = std::vector<std::pair<Rational, Rational>>;

inline Rational tail_probability(const Distribution& dist, const Rational& level) {
  Rational p(0);
  for (const auto& [v, w] : dist)
    if (v >= level) p += w;
  return p;
}

inline Rational distribution_mean(const Distribution& dist) {
  Rational m(0);
  for (const auto& [v, w] : dist) m += v * w;
  return m;
}

// Exact Pr(max_{0<=t<=T} proj_t >= level); prunes a subtree as soon as the
// level is reached.
inline Rational maximal_probability(const Strategy<Rational>& strategy,
                                    const PayoffSchedule& schedule, const PathEnsemble& ensemble,
                                    const Projection& proj, const Rational& level,
                                    const WalkOptions& opt = {}) {
  Rational prob(0);
  walk(
      strategy, schedule, ensemble,
      [&](const Ledger<Rational>& led, const Rational& w) {
        if (proj(led) >= level) {
          prob += w;
          return false;
        }
        return true;
      },
      opt);
  return prob;
}

// Exact distribution of the running maximum max_{t<=T} proj_t.
inline Distribution running_max_distribution(const Strategy<Rational>& strategy,
                                             const PayoffSchedule& schedule,
                                             const PathEnsemble& ensemble, const Projection& proj,
                                             const WalkOptions& opt = {}) {
  std::map<Rational, Rational> mass;
  std::vector<Rational> stack;  // running max per depth
  walk(
      strategy, schedule, ensemble,
      [&](const Ledger<Rational>& led, const Rational& w) {
        const size_t t = led.rounds();
        stack.resize(t + 1);
        const Rational v = proj(led);
        stack[t] = (t == 0) ? v : std::max(stack[t - 1], v);
        if (t == ensemble.horizon) mass[stack[t]] += w;
        return true;
      },
      opt);
  return Distribution(mass.begin(), mass.end());
}

// Exact distribution of proj at the stopping rule's time.
inline Distribution stopped_distribution(const Strategy<Rational>& strategy,
                                         const PayoffSchedule& schedule,
                                         const PathEnsemble& ensemble, const Projection& proj,
                                         const StoppingRule<Rational>& rule,
                                         const WalkOptions& opt = {}) {
  if (rule.bound > ensemble.horizon)
    throw std::invalid_argument("stopped_distribution: rule bound exceeds the horizon");
  std::map<Rational, Rational> mass;
  walk(
      strategy, schedule, ensemble,
      [&](const Ledger<Rational>& led, const Rational& w) {
        const size_t t = led.rounds();
        const bool stop_now = (rule.stop && rule.stop(led)) || t == rule.bound;
        if (stop_now) {
          mass[proj(led)] += w;
          return false;
        }
        return true;
      },
      opt);
  return Distribution(mass.begin(), mass.end());
}

// Stopped distributions for a family of rules in one traversal: the tree is
// walked once, every rule tracks its own stop time along the way. Equivalent
// to calling stopped_distribution per rule, at a fraction of the cost.
inline std::vector<Distribution> stopped_distributions(
    const Strategy<Rational>& strategy, const PayoffSchedule& schedule,
    const PathEnsemble& ensemble, const Projection& proj,
    const std::vector<StoppingRule<Rational>>& rules, const WalkOptions& opt = {}) {
  for (const auto& rule : rules)
    if (rule.bound > ensemble.horizon)
      throw std::invalid_argument("stopped_distributions: rule bound exceeds the horizon");

  constexpr size_t kOpen = static_cast<size_t>(-1);
  std::vector<std::map<Rational, Rational>> mass(rules.size());
  std::vector<size_t> stopped_at(rules.size(), kOpen);
  std::vector<Rational> stopped_value(rules.size());

  Ledger<Rational> ledger = detail::root_ledger(opt);
  const Rational up = ensemble.bias, down = Rational(1) - ensemble.bias;

  auto rec = [&](auto&& self, const Rational& weight) -> void {
    const size_t t = ledger.rounds();
    std::vector<size_t> newly_stopped;
    bool all_stopped = true;
    std::optional<Rational> here;
    for (size_t r = 0; r < rules.size(); ++r) {
      if (stopped_at[r] != kOpen) continue;
      if ((rules[r].stop && rules[r].stop(ledger)) || t == rules[r].bound) {
        if (!here) here = proj(ledger);
        stopped_at[r] = t;
        stopped_value[r] = *here;
        newly_stopped.push_back(r);
      } else {
        all_stopped = false;
      }
    }
    if (t == ensemble.horizon || all_stopped) {
      for (size_t r = 0; r < rules.size(); ++r) mass[r][stopped_value[r]] += weight;
    } else {
      const BetDecision<Rational> d = strategy.decide(ledger);
      const Rational bonus = schedule.bonus(t + 1);
      std::optional<Rational> eta;
      if (opt.eta) eta = opt.eta->weight(ledger);
      for (int side : {+1, -1}) {
        const Rational& p = side > 0 ? up : down;
        if (p == 0) continue;
        ledger.apply(d, Outcome(side), bonus, eta, opt.compound);
        self(self, weight * p);
        ledger.truncate(t);
      }
    }
    for (size_t r : newly_stopped) stopped_at[r] = kOpen;
  };
  rec(rec, Rational(1));

  std::vector<Distribution> out;
  out.reserve(rules.size());
  for (auto& m : mass) out.emplace_back(m.begin(), m.end());
  return out;
}

// Distinct values proj takes at any node; threshold pool for sampled rules.
inline std::vector<Rational> achieved_values(const Strategy<Rational>& strategy,
                                             const PayoffSchedule& schedule,
                                             const PathEnsemble& ensemble, const Projection& proj,
                                             const WalkOptions& opt = {}) {
  std::set<Rational> values;
  walk(
      strategy, schedule, ensemble,
      [&](const Ledger<Rational>& led, const Rational&) {
        values.insert(proj(led));
        return true;
      },
      opt);
  return std::vector<Rational>(values.begin(), values.end());
}

// ---------------------------------------------------------------------------
// certificate verification
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = true;
  std::optional<Rational> witness_level;
  std::vector<uint32_t> witness_masks;     // bit i set = round i+1 came up heads
  std::vector<std::string> witness_paths;  // same paths, rendered
  std::string detail;
};

namespace detail {

// A maximal/stopped tail is a step function with jumps exactly at achieved
// values, so checking the bound at every achieved level (plus any grid the
// caller cares about) decides it for all x > b. Tails come from one suffix
// pass over the sorted distribution.
inline void check_levels(const Distribution& dist, const EvidenceCertificate& cert,
                         const std::vector<Rational>& grid, CheckResult& out) {
  std::vector<Rational> suffix(dist.size() + 1, Rational(0));
  for (size_t i = dist.size(); i-- > 0;) suffix[i] = suffix[i + 1] + dist[i].second;

  auto violates = [&](const Rational& x, const Rational& tail) {
    if (x <= cert.b) return false;
    const Rational bound = tail_bound(cert, x);
    if (tail <= bound) return false;
    out.pass = false;
    out.witness_level = x;
    out.detail = "tail " + format_rational(tail) + " exceeds bound " + format_rational(bound) +
                 " at level " + format_rational(x);
    return true;
  };

  for (size_t i = 0; i < dist.size(); ++i)
    if (violates(dist[i].first, suffix[i])) return;
  for (const Rational& x : grid) {
    const size_t i = static_cast<size_t>(
        std::lower_bound(dist.begin(), dist.end(), x,
                         [](const auto& entry, const Rational& level) {
                           return entry.first < level;
                         }) -
        dist.begin());
    if (violates(x, suffix[i])) return;
  }
}

inline uint32_t path_mask(const Ledger<Rational>& led) {
  uint32_t mask = 0;
  const auto& xs = led.outcomes();
  for (size_t i = 0; i < xs.size(); ++i)
    if (xs[i].value() > 0) mask |= (uint32_t{1} << i);
  return mask;
}

}  // namespace detail

// Checks a certificate against the exact law of the process. Sequential kind:
// the running-maximum tail is bounded at every jump point and grid level.
// Stopped kind: the tail of the stopped value under `rule` is bounded the
// same way. On failure the result carries the witnessing level and up to 16
// witnessing paths.
inline CheckResult verify_certificate(const Strategy<Rational>& strategy,
                                      const PayoffSchedule& schedule, const PathEnsemble& ensemble,
                                      const Projection& proj, const EvidenceCertificate& cert,
                                      const std::vector<Rational>& grid = {},
                                      const StoppingRule<Rational>* rule = nullptr,
                                      const WalkOptions& opt = {}) {
  CheckResult result;
  result.name = std::string(to_string(cert.subject)) + "-" + to_string(cert.kind);

  Distribution dist;
  if (cert.kind == EvidenceKind::Sequential) {
    dist = running_max_distribution(strategy, schedule, ensemble, proj, opt);
  } else {
    if (!rule)
      throw std::invalid_argument("verify_certificate: stopped certificate needs a rule");
    dist = stopped_distribution(strategy, schedule, ensemble, proj, *rule, opt);
    result.name += ":" + rule->id;
  }
  detail::check_levels(dist, cert, grid, result);

  if (!result.pass) {
    // collect a few witnessing paths
    const Rational level = *result.witness_level;
    std::vector<Rational> running;
    walk(
        strategy, schedule, ensemble,
        [&](const Ledger<Rational>& led, const Rational&) {
          if (result.witness_masks.size() >= 16) return false;
          const size_t t = led.rounds();
          if (cert.kind == EvidenceKind::Sequential) {
            running.resize(t + 1);
            const Rational v = proj(led);
            running[t] = (t == 0) ? v : std::max(running[t - 1], v);
            if (t == ensemble.horizon && running[t] >= level) {
              result.witness_masks.push_back(detail::path_mask(led));
              result.witness_paths.push_back(format_path(led.outcomes()));
            }
          } else {
            const bool stop_now = (rule->stop && rule->stop(led)) || t == rule->bound;
            if (stop_now) {
              if (proj(led) >= level) {
                result.witness_masks.push_back(detail::path_mask(led));
                result.witness_paths.push_back(format_path(led.outcomes()));
              }
              return false;
            }
          }
          return true;
        },
        opt);
  }
  return result;
}

// Seeded family of bounded stopping rules: fixed times and first-crossing
// rules over the given threshold pool. Rule ids record family, parameters
// and seed, so any report naming a rule can be replayed.
inline std::vector<StoppingRule<Rational>> sample_stopping_rules(
    size_t count, size_t horizon, const std::vector<Rational>& thresholds, const Projection& proj,
    uint64_t seed) {
  std::vector<StoppingRule<Rational>> rules;
  rules.reserve(count);
  SplitMix64 rng(seed);
  for (size_t i = 0; i < count; ++i) {
    const bool fixed = thresholds.empty() || (rng.next() & 1u) == 0;
    if (fixed) {
      const size_t t = static_cast<size_t>(rng.next_below(horizon + 1));
      StoppingRule<Rational> r = StoppingRule<Rational>::fixed_time(t);
      r.id += ",seed=" + std::to_string(seed) + ",i=" + std::to_string(i);
      rules.push_back(std::move(r));
    } else {
      const Rational theta = thresholds[rng.next_below(thresholds.size())];
      const size_t warmup = static_cast<size_t>(rng.next_below(std::min<size_t>(horizon, 3) + 1));
      StoppingRule<Rational> r;
      r.id = "cross:theta=" + format_rational(theta) + ",warmup=" + std::to_string(warmup) +
             ",seed=" + std::to_string(seed) + ",i=" + std::to_string(i);
      r.bound = horizon;
      r.stop = [theta, warmup, proj](const Ledger<Rational>& led) {
        return led.rounds() >= warmup && proj(led) >= theta;
      };
      rules.push_back(std::move(r));
    }
  }
  return rules;
}

// Checks a certificate's stopped form against a seeded family of bounded
// stopping rules (fixed times and threshold crossings over the process's
// achieved values). A sequential certificate must survive every bounded
// rule; one failing rule is a counterexample to the sequential claim at the
// same level.
inline std::vector<CheckResult> check_stopped_family(
    const Strategy<Rational>& strategy, const PayoffSchedule& schedule,
    const PathEnsemble& ensemble, const Projection& proj, const EvidenceCertificate& cert,
    size_t count = 64, uint64_t seed = 1, const WalkOptions& opt = {}) {
  const auto thresholds = achieved_values(strategy, schedule, ensemble, proj, opt);
  const auto rules = sample_stopping_rules(count, ensemble.horizon, thresholds, proj, seed);
  const auto dists = stopped_distributions(strategy, schedule, ensemble, proj, rules, opt);
  std::vector<CheckResult> results(rules.size());
  for (size_t r = 0; r < rules.size(); ++r) {
    EvidenceCertificate stopped = cert;
    stopped.kind = EvidenceKind::Stopped;
    stopped.stopping_rule = rules[r].id;
    results[r].name = std::string(to_string(cert.subject)) + "-stopped:" + rules[r].id;
    detail::check_levels(dists[r], stopped, {}, results[r]);
  }
  return results;
}

// ---------------------------------------------------------------------------
// almost-supermartingale (Robbins-Siegmund) check
// ---------------------------------------------------------------------------

struct RobbinsSiegmundReport {
  bool decomposition_ok = true;  // E[Z_t|past] == Z_{t-1}(1+b_t) + xi_t - zeta_t, Z >= 0
  std::string decomposition_detail;
  bool bound_ok = true;  // Pr(max Z >= x) <= (Z_0 + sum E xi)/x + sum E b
  std::optional<Rational> witness_level;
  std::string bound_detail;

  bool pass() const { return decomposition_ok && bound_ok; }
};

// The three driver processes are predictable: each is evaluated on the
// prefix before the round it describes.
inline RobbinsSiegmundReport robbins_siegmund_check(
    const Strategy<Rational>& strategy, const PayoffSchedule& schedule,
    const PathEnsemble& ensemble, const Projection& z, const Projection& growth,
    const Projection& gain, const Projection& drain, const std::vector<Rational>& grid = {},
    const WalkOptions& opt = {}) {
  RobbinsSiegmundReport report;

  std::vector<Rational> expected_gain(ensemble.horizon + 1, Rational(0));
  std::vector<Rational> expected_growth(ensemble.horizon + 1, Rational(0));
  Rational z0(0);
  std::map<Rational, Rational> max_mass;
  std::vector<Rational> running;

  Ledger<Rational> ledger = detail::root_ledger(opt);
  const Rational up = ensemble.bias, down = Rational(1) - ensemble.bias;

  auto note_decomposition_failure = [&](const std::string& msg) {
    if (report.decomposition_ok) {
      report.decomposition_ok = false;
      report.decomposition_detail = msg;
    }
  };

  auto rec = [&](auto&& self, const Rational& weight) -> void {
    const size_t done = ledger.rounds();
    const Rational here = z(ledger);
    if (here < 0)
      note_decomposition_failure("Z negative at prefix " + format_path(ledger.outcomes()));
    running.resize(done + 1);
    running[done] = done == 0 ? here : std::max(running[done - 1], here);
    if (done == 0) z0 = here;
    if (done == ensemble.horizon) {
      max_mass[running[done]] += weight;
      return;
    }

    const Rational b = growth(ledger);
    const Rational xi = gain(ledger);
    const Rational zeta = drain(ledger);
    if (b < 0 || xi < 0 || zeta < 0)
      note_decomposition_failure("driver process negative at prefix " +
                                 format_path(ledger.outcomes()));
    expected_gain[done + 1] += weight * xi;
    expected_growth[done + 1] += weight * b;

    const BetDecision<Rational> d = strategy.decide(ledger);
    const Rational bonus = schedule.bonus(done + 1);
    std::optional<Rational> eta;
    if (opt.eta) eta = opt.eta->weight(ledger);

    Rational mean(0);
    for (int side : {+1, -1}) {
      const Rational& p = side > 0 ? up : down;
      if (p == 0) continue;
      ledger.apply(d, Outcome(side), bonus, eta, opt.compound);
      mean += p * z(ledger);
      self(self, weight * p);
      ledger.truncate(done);
    }
    if (mean != here * (Rational(1) + b) + xi - zeta)
      note_decomposition_failure("decomposition identity fails after prefix " +
                                 format_path(ledger.outcomes()));
  };
  rec(rec, Rational(1));

  Rational total_gain(0), total_growth(0);
  for (size_t t = 1; t <= ensemble.horizon; ++t) {
    total_gain += expected_gain[t];
    total_growth += expected_growth[t];
  }

  const Distribution dist(max_mass.begin(), max_mass.end());
  std::vector<Rational> suffix(dist.size() + 1, Rational(0));
  for (size_t i = dist.size(); i-- > 0;) suffix[i] = suffix[i + 1] + dist[i].second;
  auto violates = [&](const Rational& x, const Rational& tail) {
    if (x <= 0) return false;
    const Rational bound = (z0 + total_gain) / x + total_growth;
    if (tail <= bound) return false;
    report.bound_ok = false;
    report.witness_level = x;
    report.bound_detail = "tail " + format_rational(tail) + " exceeds bound " +
                          format_rational(bound) + " at level " + format_rational(x);
    return true;
  };
  for (size_t i = 0; i < dist.size() && report.bound_ok; ++i) violates(dist[i].first, suffix[i]);
  for (const Rational& x : grid) {
    if (!report.bound_ok) break;
    const size_t i = static_cast<size_t>(
        std::lower_bound(dist.begin(), dist.end(), x,
                         [](const auto& entry, const Rational& level) {
                           return entry.first < level;
                         }) -
        dist.begin());
    violates(x, suffix[i]);
  }
  return report;
}

// ---------------------------------------------------------------------------
// liability constants and attestation
// ---------------------------------------------------------------------------

struct LiabilityConstants {
  Rational stopped{0};        // E[L_tau] for the supplied rule
  Rational running_sup{0};    // sup_t E[L_t]
  Rational positive_part{0};  // sup_t E[sum_{i<=t} (1+b_i) borrow_i^+]
  Rational bonus_sum{0};      // sum of bonuses up to the horizon
};

inline LiabilityConstants expected_liability_constants(const Strategy<Rational>& strategy,
                                                       const PayoffSchedule& schedule,
                                                       const PathEnsemble& ensemble,
                                                       const StoppingRule<Rational>* rule
                                                       = nullptr) {
  LiabilityConstants out;
  std::vector<Rational> liab_mean(ensemble.horizon + 1, Rational(0));
  walk(strategy, schedule, ensemble, [&](const Ledger<Rational>& led, const Rational& w) {
    const size_t t = led.rounds();
    liab_mean[t] += w * led.liabilities().back();
    if (t > 0) {
      const BetDecision<Rational>& d = led.decisions().back();
      if (d.borrow > 0)
        out.positive_part += w * (Rational(1) + led.bonuses().back()) * d.borrow;
    }
    return true;
  });
  // positive-part increments are nonnegative, so the sup over t is the total
  for (size_t t = 0; t <= ensemble.horizon; ++t)
    out.running_sup = std::max(out.running_sup, liab_mean[t]);
  for (size_t t = 1; t <= ensemble.horizon; ++t) out.bonus_sum += schedule.bonus(t);
  if (rule)
    out.stopped = distribution_mean(
        stopped_distribution(strategy, schedule, ensemble, liabilities_value(), *rule));
  return out;
}

inline bool all_borrows_nonnegative(const Strategy<Rational>& strategy,
                                    const PayoffSchedule& schedule,
                                    const PathEnsemble& ensemble) {
  bool ok = true;
  walk(strategy, schedule, ensemble, [&](const Ledger<Rational>& led, const Rational&) {
    if (led.rounds() > 0 && led.decisions().back().borrow < 0) {
      ok = false;
      return false;
    }
    return ok;
  });
  return ok;
}

// Minimum of the projection over every reachable prefix (all t <= T).
inline Rational pathwise_minimum(const Strategy<Rational>& strategy,
                                 const PayoffSchedule& schedule, const PathEnsemble& ensemble,
                                 const Projection& proj, const WalkOptions& opt = {}) {
  std::optional<Rational> min;
  walk(
      strategy, schedule, ensemble,
      [&](const Ledger<Rational>& led, const Rational&) {
        const Rational v = proj(led);
        if (!min || v < *min) min = v;
        return true;
      },
      opt);
  return *min;
}

// Builds an attestation by exhaustive enumeration. Floors are the exact
// pathwise minima (replaced by 0 in the degenerate case where the process
// never drops below 1, so that the floor stays below 1).
inline AssumptionReport attest(const Strategy<Rational>& strategy, const PayoffSchedule& schedule,
                               const PathEnsemble& ensemble,
                               const StoppingRule<Rational>* rule = nullptr,
                               const EtaWeights<Rational>* eta = nullptr) {
  AssumptionReport report;
  const LiabilityConstants constants =
      expected_liability_constants(strategy, schedule, ensemble, rule);
  report.nonnegative_borrowings = all_borrows_nonnegative(strategy, schedule, ensemble);
  report.optional_stopping = "bounded stopping time at finite horizon";
  if (rule) report.expected_stopped_liabilities = constants.stopped;
  report.expected_liabilities_sup = constants.running_sup;
  report.positive_borrow_bound = constants.positive_part;
  report.bonus_total = constants.bonus_sum;

  auto floor_of = [&](const Projection& proj, const WalkOptions& opt) {
    const Rational m = pathwise_minimum(strategy, schedule, ensemble, proj, opt);
    return m < 1 ? m : Rational(0);
  };
  report.net_floor = floor_of(net_value(), {});
  if (eta) {
    WalkOptions opt;
    opt.eta = eta;
    report.sub_net_floor = floor_of(sub_net_value(), opt);
  }
  if (!schedule.fair()) {
    WalkOptions opt;
    opt.compound = true;
    report.adjusted_net_floor = floor_of(adjusted_net_value(), opt);
  }
  return report;
}

}  // namespace ebb::oracle
