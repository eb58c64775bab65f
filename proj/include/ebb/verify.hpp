#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ebb/evidence.hpp"
#include "ebb/game.hpp"
#include "ebb/leverage.hpp"
#include "ebb/oracle.hpp"
#include "ebb/random.hpp"
#include "ebb/rational.hpp"
#include "ebb/strategies.hpp"

// Proposition-level check suites shared by the command line and the
// acceptance harness. Each suite runs a family of exact checks and reports
// one line per family plus one per failure.
namespace ebb::verify {

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::vector<std::string> lines;

  void note(const std::string& line) { lines.push_back(line); }
  void check(bool ok, const std::string& line) {
    if (!ok) {
      pass = false;
      lines.push_back("FAIL: " + line);
    }
  }
};

// ---------------------------------------------------------------------------
// strategy corpus
// ---------------------------------------------------------------------------

struct CorpusEntry {
  Strategy<Rational> strategy;
  size_t horizon;
  bool nonneg_borrows_requested;
};

// Deterministic corpus: horizons cycle through 4..max_horizon, borrow signs
// alternate between mixed and nonnegative.
inline std::vector<CorpusEntry> strategy_corpus(size_t count, size_t max_horizon, uint64_t seed) {
  if (max_horizon < 4) throw std::invalid_argument("strategy_corpus: max_horizon < 4");
  std::vector<CorpusEntry> corpus;
  corpus.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    const bool nonneg = (i % 2) == 1;
    const size_t horizon = 4 + (i % (max_horizon - 3));
    corpus.push_back({random_strategy<Rational>(substream_seed(seed, i), nonneg), horizon, nonneg});
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// reference two-round example
// ---------------------------------------------------------------------------

struct ExampleRow {
  int first, second;
  Rational gross, net, net_e, sub_net, sub_net_e;          // computed
  Rational ref_gross, ref_net, ref_net_e, ref_sub_net, ref_sub_net_e;
  bool main_columns_match = false;
  bool sub_columns_match = false;
};

// The two-round game with borrow 1 and fraction 1/2 each round, sub-liability
// weights doubling after a losing toss. Net e-values standardize with
// (2, -1), sub-net with (4, -3). The reference values are the published ones
// this example reproduces; the (-1,+1) row of the sub-net columns is known
// to disagree with what predictability of the sub-liabilities forces (the
// weight of the second borrow is fixed by the first toss, so that row's
// sub-liabilities are 4, not 2), and the mismatch is reported, not patched.
inline std::vector<ExampleRow> two_round_reference() {
  struct Ref {
    int x1, x2;
    const char *w, *n, *ne, *sn, *sne;
  };
  const Ref refs[] = {
      {-1, -1, "1", "-1", "0", "-3", "0"},
      {-1, +1, "3", "1", "1", "1", "1"},
      {+1, -1, "2", "0", "1/2", "0", "3/4"},
      {+1, +1, "6", "4", "5/2", "4", "7/4"},
  };
  const Strategy<Rational> strategy = constant_strategy<Rational>(Rational(1, 2), Rational(1));
  const EtaWeights<Rational> eta = loss_penalty_weights<Rational>();

  std::vector<ExampleRow> rows;
  for (const Ref& ref : refs) {
    const Path path{Outcome(ref.x1), Outcome(ref.x2)};
    const Ledger<Rational> ledger = attach_sub_liabilities(run_game(strategy, path), eta);
    ExampleRow row;
    row.first = ref.x1;
    row.second = ref.x2;
    row.gross = ledger.gross().back();
    row.net = ledger.net().back();
    row.net_e = to_e_value(row.net, Rational(2), Rational(-1));
    row.sub_net = ledger.sub_net().back();
    row.sub_net_e = to_e_value(row.sub_net, Rational(4), Rational(-3));
    row.ref_gross = parse_rational(ref.w);
    row.ref_net = parse_rational(ref.n);
    row.ref_net_e = parse_rational(ref.ne);
    row.ref_sub_net = parse_rational(ref.sn);
    row.ref_sub_net_e = parse_rational(ref.sne);
    row.main_columns_match =
        row.gross == row.ref_gross && row.net == row.ref_net && row.net_e == row.ref_net_e;
    row.sub_columns_match =
        row.sub_net == row.ref_sub_net && row.sub_net_e == row.ref_sub_net_e;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline SuiteResult suite_table() {
  SuiteResult result;
  result.name = "table";
  const auto rows = two_round_reference();
  size_t flagged = 0;
  for (const ExampleRow& row : rows) {
    result.check(row.main_columns_match,
                 "main columns mismatch on row (" + std::to_string(row.first) + "," +
                     std::to_string(row.second) + ")");
    if (!row.sub_columns_match) ++flagged;
  }
  // exactly the (-1,+1) row must disagree, with sub-net -1 and e-value 1/2
  const ExampleRow& odd = rows[1];
  result.check(flagged == 1 && !odd.sub_columns_match && odd.sub_net == -1 &&
                   odd.sub_net_e == Rational(1, 2),
               "expected exactly the (-1,+1) sub-net row to be flagged with values -1 and 1/2");
  result.note("4 rows compared; sub-net row (-1,+1) flagged as expected");
  return result;
}

// ---------------------------------------------------------------------------
// decomposition suite
// ---------------------------------------------------------------------------

inline SuiteResult suite_doob(const std::vector<CorpusEntry>& corpus,
                              bool require_both_sign_classes = true) {
  SuiteResult result;
  result.name = "doob";
  const PayoffSchedule fair;
  size_t with_negative = 0, without_negative = 0;
  for (const CorpusEntry& entry : corpus) {
    const oracle::PathEnsemble ensemble(entry.horizon, Rational(1, 2));
    const oracle::DoobReport doob = oracle::doob_check(entry.strategy, fair, ensemble);
    result.check(doob.pass(), entry.strategy.name + ": " + doob.detail +
                                  " (max net drift " +
                                  format_rational(doob.net.max_abs_drift) + ")");

    const bool nonneg = oracle::all_borrows_nonnegative(entry.strategy, fair, ensemble);
    (nonneg ? without_negative : with_negative) += 1;
    const auto gross = oracle::martingale_check(entry.strategy, fair, ensemble,
                                                oracle::gross_value());
    result.check(gross.is_submartingale() == nonneg,
                 entry.strategy.name + ": gross verdict " + to_string(gross.verdict()) +
                     " contradicts borrow signs");
  }
  if (require_both_sign_classes)
    result.check(with_negative > 0 && without_negative > 0,
                 "corpus must contain both borrow-sign classes");
  std::ostringstream line;
  line << corpus.size() << " strategies (" << with_negative
       << " with negative borrows): net drift 0 everywhere, gross submartingale iff borrows "
       << "nonnegative";
  result.note(line.str());
  return result;
}

inline SuiteResult suite_doob(size_t count, size_t max_horizon, uint64_t seed) {
  return suite_doob(strategy_corpus(count, max_horizon, seed));
}

// ---------------------------------------------------------------------------
// certificate suite
// ---------------------------------------------------------------------------

inline SuiteResult suite_certificates(const std::vector<CorpusEntry>& corpus) {
  SuiteResult result;
  result.name = "certificates";
  const PayoffSchedule fair;
  const EtaWeights<Rational> eta = loss_penalty_weights<Rational>();
  size_t sub_checked = 0;
  for (const CorpusEntry& entry : corpus) {
    const oracle::PathEnsemble ensemble(entry.horizon, Rational(1, 2));
    const auto rule = StoppingRule<Rational>::fixed_time(entry.horizon);
    const AssumptionReport report =
        oracle::attest(entry.strategy, fair, ensemble, &rule, &eta);
    const std::string& name = entry.strategy.name;

    // stopped gross wealth, discounted by expected stopped liabilities (net
    // lenders can have a negative expectation, where the unit constant holds)
    {
      const Rational stopped_liabilities = *report.expected_stopped_liabilities;
      const Rational constant = stopped_liabilities > 0 ? stopped_liabilities : Rational(0);
      const auto cert = certify_gross_stopped(constant, rule.id, report);
      const auto check = oracle::verify_certificate(entry.strategy, fair, ensemble,
                                                    oracle::gross_value(), cert, {}, &rule);
      result.check(check.pass, name + " stopped gross: " + check.detail);
      const auto dist = oracle::stopped_distribution(entry.strategy, fair, ensemble,
                                                     oracle::gross_value(), rule);
      result.check(oracle::distribution_mean(dist) == Rational(1) + stopped_liabilities,
                   name + ": stopped gross mean differs from 1 + E[liabilities]");
    }
    // sequential gross wealth via the positive-part bound
    {
      const auto cert = certify_gross_sequential(*report.positive_borrow_bound, 0, report);
      const auto check = oracle::verify_certificate(entry.strategy, fair, ensemble,
                                                    oracle::gross_value(), cert);
      result.check(check.pass, name + " sequential gross: " + check.detail);
      if (report.nonnegative_borrowings) {
        result.check(*report.expected_liabilities_sup == *report.positive_borrow_bound,
                     name + ": liability sup differs from positive-part bound");
        certify_gross_sequential(*report.expected_liabilities_sup, 0, report);  // both routes
      }
    }
    // net wealth above its exact floor, sequential and stopped
    {
      const Rational floor = *report.net_floor;
      const auto cert = certify_net(floor, WealthSubject::Net, EvidenceKind::Sequential, report);
      const auto check = oracle::verify_certificate(entry.strategy, fair, ensemble,
                                                    oracle::net_value(), cert);
      result.check(check.pass, name + " sequential net: " + check.detail);
      const auto stopped =
          certify_net(floor, WealthSubject::Net, EvidenceKind::Stopped, report, rule.id);
      const auto stopped_check = oracle::verify_certificate(
          entry.strategy, fair, ensemble, oracle::net_value(), stopped, {}, &rule);
      result.check(stopped_check.pass, name + " stopped net: " + stopped_check.detail);
      const auto dist = oracle::stopped_distribution(entry.strategy, fair, ensemble,
                                                     oracle::net_value(), rule);
      Rational mean(0);
      for (const auto& [v, w] : dist) mean += w * to_e_value(v, cert.a, cert.b);
      result.check(mean == 1, name + ": stopped net e-value mean is not exactly 1");
    }
    // sub-net wealth: the weighted liabilities only dominate for nonnegative
    // borrows, so the certificate applies to that half of the corpus
    if (report.nonnegative_borrowings) {
      ++sub_checked;
      oracle::WalkOptions opt;
      opt.eta = &eta;
      const Rational floor = *report.sub_net_floor;
      const auto cert =
          certify_net(floor, WealthSubject::SubNet, EvidenceKind::Sequential, report);
      const auto check = oracle::verify_certificate(entry.strategy, fair, ensemble,
                                                    oracle::sub_net_value(), cert, {}, nullptr,
                                                    opt);
      result.check(check.pass, name + " sequential sub-net: " + check.detail);
      const auto dist = oracle::stopped_distribution(entry.strategy, fair, ensemble,
                                                     oracle::sub_net_value(), rule, opt);
      Rational mean(0);
      for (const auto& [v, w] : dist) mean += w * to_e_value(v, cert.a, cert.b);
      result.check(mean <= 1, name + ": stopped sub-net e-value mean exceeds 1");
    }
  }
  std::ostringstream line;
  line << corpus.size() << " strategies: stopped/sequential gross, net and " << sub_checked
       << " sub-net certificates hold at every jump point (exact)";
  result.note(line.str());
  return result;
}

inline SuiteResult suite_certificates(size_t count, size_t max_horizon, uint64_t seed) {
  return suite_certificates(strategy_corpus(count, max_horizon, seed));
}

// Floor-guarded strategies: the guard's floor is attested by construction
// and the oracle confirms it pathwise.
inline SuiteResult suite_guard(size_t count, size_t max_horizon, uint64_t seed) {
  SuiteResult result;
  result.name = "guard";
  const PayoffSchedule fair;
  const size_t span = max_horizon > 4 ? max_horizon - 3 : 1;
  for (size_t i = 0; i < count; ++i) {
    const size_t horizon = 4 + (i % span);
    const Rational floor = Rational(-1) - Rational(i % 5, 2);
    const auto base = random_strategy<Rational>(substream_seed(seed, 1000 + i), false);
    const auto guarded = net_floor_guard(base, floor);
    const oracle::PathEnsemble ensemble(horizon, Rational(1, 2));

    const Rational min_net =
        oracle::pathwise_minimum(guarded, fair, ensemble, oracle::net_value());
    result.check(min_net >= floor, guarded.name + ": floor violated, min net " +
                                       format_rational(min_net));

    AssumptionReport report;  // attested by the guard construction
    report.net_floor = floor;
    const auto cert = certify_net(floor, WealthSubject::Net, EvidenceKind::Sequential, report);
    const auto check =
        oracle::verify_certificate(guarded, fair, ensemble, oracle::net_value(), cert);
    result.check(check.pass, guarded.name + ": " + check.detail);
  }
  result.note(std::to_string(count) + " guarded strategies hold their floors pathwise");
  return result;
}

// ---------------------------------------------------------------------------
// stopping-time suite
// ---------------------------------------------------------------------------

inline SuiteResult suite_stopping(const std::vector<CorpusEntry>& corpus, size_t rules_per,
                                  uint64_t seed) {
  SuiteResult result;
  result.name = "stopping";
  const PayoffSchedule fair;
  for (const CorpusEntry& entry : corpus) {
    const oracle::PathEnsemble ensemble(entry.horizon, Rational(1, 2));
    const AssumptionReport report = oracle::attest(entry.strategy, fair, ensemble);
    const auto cert = certify_gross_sequential(*report.positive_borrow_bound, 0, report);

    const auto sequential = oracle::verify_certificate(entry.strategy, fair, ensemble,
                                                       oracle::gross_value(), cert);
    result.check(sequential.pass, entry.strategy.name + " sequential: " + sequential.detail);

    const auto family =
        oracle::check_stopped_family(entry.strategy, fair, ensemble, oracle::gross_value(),
                                     cert, rules_per, substream_seed(seed, 77));
    for (const auto& check : family)
      result.check(!sequential.pass || check.pass,
                   entry.strategy.name + " " + check.name + ": " + check.detail);
  }
  result.note(std::to_string(corpus.size()) + " strategies x " + std::to_string(rules_per) +
              " sampled bounded rules: stopped bounds follow the sequential certificate");

  // injected understatement: deterministic borrowers make the sequential
  // bound tight at the terminal wealth, so shaving 1/2 off the constant must
  // produce a witness, for the running maximum and at a fixed-time rule alike
  for (const Rational& borrow : {Rational(1, 2), Rational(1), Rational(2)}) {
    for (size_t horizon : {4u, 6u, 8u}) {
      const auto strategy = constant_strategy<Rational>(0, borrow);
      const oracle::PathEnsemble ensemble(horizon, Rational(1, 2));
      const AssumptionReport report = oracle::attest(strategy, fair, ensemble);
      EvidenceCertificate bogus{Rational(1) + *report.positive_borrow_bound - Rational(1, 2),
                                Rational(0), Rational(0), EvidenceKind::Sequential,
                                WealthSubject::Gross, ""};
      const auto check = oracle::verify_certificate(strategy, fair, ensemble,
                                                    oracle::gross_value(), bogus);
      result.check(!check.pass && check.witness_level.has_value() &&
                       !check.witness_masks.empty(),
                   strategy.name + ": understated certificate was not falsified");
      if (check.pass) continue;

      const auto rule = StoppingRule<Rational>::fixed_time(horizon);
      EvidenceCertificate bogus_stopped = bogus;
      bogus_stopped.kind = EvidenceKind::Stopped;
      bogus_stopped.stopping_rule = rule.id;
      const auto stopped_check = oracle::verify_certificate(
          strategy, fair, ensemble, oracle::gross_value(), bogus_stopped, {}, &rule);
      result.check(!stopped_check.pass,
                   strategy.name + ": understated stopped certificate was not falsified");
      // a stopped failure forces a sequential failure at the same level
      if (!stopped_check.pass) {
        const Rational x = *stopped_check.witness_level;
        const auto stopped_dist = oracle::stopped_distribution(
            strategy, fair, ensemble, oracle::gross_value(), rule);
        const auto max_dist = oracle::running_max_distribution(strategy, fair, ensemble,
                                                               oracle::gross_value());
        result.check(oracle::tail_probability(max_dist, x) >=
                         oracle::tail_probability(stopped_dist, x),
                     strategy.name + ": running-max tail below stopped tail");
      }
    }
  }
  result.note("9 deterministic borrowers: certificates understated by 1/2 falsified with "
              "witnesses");
  return result;
}

inline SuiteResult suite_stopping(size_t count, size_t rules_per, size_t max_horizon,
                                  uint64_t seed) {
  return suite_stopping(strategy_corpus(count, max_horizon, seed), rules_per, seed);
}

// ---------------------------------------------------------------------------
// bet-and-save suite
// ---------------------------------------------------------------------------

struct BetSaveConfig {
  SaveSchedule<Rational> schedule;
  InnerBets<Rational> bets;
  std::string label;
};

inline std::vector<BetSaveConfig> bet_and_save_configs(uint64_t seed) {
  std::vector<BetSaveConfig> configs;
  auto constant_mu = [](const Rational& mu) {
    return [mu](const Ledger<Rational>&, size_t) { return mu; };
  };
  auto alternating_mu = [](const Ledger<Rational>&, size_t period) {
    return period % 2 == 0 ? Rational(1) : Rational(-1, 2);
  };
  auto hashed_mu = [seed](const Ledger<Rational>& past, size_t) {
    uint64_t bits = 1;
    for (const Outcome& x : past.outcomes()) bits = (bits << 1) | (x.value() > 0 ? 1u : 0u);
    return Rational(static_cast<int64_t>(mix64(seed ^ bits) % 17) - 8, 8);
  };

  using Sched = SaveSchedule<Rational>;
  const std::vector<std::pair<std::vector<size_t>, std::vector<Rational>>> fixed = {
      {{1}, {Rational(1)}},
      {{2}, {Rational(2)}},
      {{3}, {Rational(1, 2)}},
      {{1, 2}, {Rational(1), Rational(1)}},
      {{2, 4}, {Rational(1), Rational(3)}},
      {{3, 5}, {Rational(1, 2), Rational(3, 2)}},
      {{1, 2, 3}, {Rational(1), Rational(1), Rational(1)}},
      {{2, 4, 6}, {Rational(1), Rational(1, 2), Rational(5, 2)}},
      {{1, 3, 5, 7}, {Rational(1), Rational(2), Rational(1), Rational(1)}},
      {{2, 4, 6, 8}, {Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2)}},
  };
  const std::vector<std::pair<std::string, InnerBets<Rational>>> bet_rules = {
      {"mu=1", constant_mu(Rational(1))},
      {"mu=1/2", constant_mu(Rational(1, 2))},
      {"alternating", alternating_mu},
      {"hashed", hashed_mu},
  };
  size_t which = 0;
  for (const auto& [times, borrows] : fixed) {
    for (const auto& [label, bets] : bet_rules) {
      if (which++ % 2 == 0 && times.size() > 1) continue;  // keep the mix varied but small
      configs.push_back({Sched::fixed(times, borrows), bets,
                         "fixed{" + std::to_string(times.size()) + "p}" + label});
    }
  }

  // first-crossing save rules: close a period once the tranche has doubled,
  // with the fixed bound as a backstop
  auto crossing = [](size_t bound, Rational target) {
    StoppingRule<Rational> rule;
    rule.id = "cross:target=" + format_rational(target) + ",bound=" + std::to_string(bound);
    rule.bound = bound;
    rule.stop = [target](const Ledger<Rational>& led) {
      return led.rounds() > 0 && led.gross().back() >= target;
    };
    return rule;
  };
  configs.push_back({Sched({crossing(3, Rational(3))}, {Rational(1)}), constant_mu(Rational(1)),
                     "crossing-1p"});
  configs.push_back({Sched({crossing(2, Rational(2)), crossing(5, Rational(4))},
                           {Rational(1), Rational(1)}),
                     constant_mu(Rational(1)), "crossing-2p"});
  configs.push_back({Sched({crossing(3, Rational(4)), crossing(6, Rational(6)),
                            crossing(9, Rational(9))},
                           {Rational(2), Rational(1), Rational(1)}),
                     constant_mu(Rational(1, 2)), "crossing-3p"});
  return configs;
}

inline SuiteResult suite_betsave(uint64_t seed) {
  SuiteResult result;
  result.name = "betsave";
  const PayoffSchedule fair;
  const auto configs = bet_and_save_configs(seed);
  for (const BetSaveConfig& config : configs) {
    const size_t horizon = config.schedule.last_bound();
    const auto strategy = bet_and_save(config.schedule, config.bets, config.label);
    const oracle::PathEnsemble ensemble(horizon, Rational(1, 2));

    Rational expected(0);
    bool identity_ok = true;
    bool savings_ok = true;
    std::string detail;
    oracle::walk(strategy, fair, ensemble, [&](const Ledger<Rational>& led, const Rational& w) {
      if (led.rounds() < horizon) return true;
      PeriodEvidence ev;  // period_e_values rechecks the identity and throws on violation
      try {
        ev = period_e_values(led, config.schedule);
      } catch (const std::exception& e) {
        identity_ok = false;
        detail = e.what();
        return true;
      }
      expected += w * ev.combined;
      const Rational direct = (led.gross()[ev.save_times.back()] - 1) / ev.total_liability;
      identity_ok = identity_ok && ev.combined == direct && ev.net_based == direct;
      // saved wealth is never risked: gross never drops below the last save level
      size_t period = 0;
      for (size_t t = 1; t <= led.rounds() && period < ev.save_times.size(); ++t) {
        const size_t start = period == 0 ? 0 : ev.save_times[period - 1];
        if (led.gross()[t] < led.gross()[start]) savings_ok = false;
        if (t == ev.save_times[period]) ++period;
      }
      return true;
    });
    result.check(identity_ok, config.label + ": averaging identity broken " + detail);
    result.check(savings_ok, config.label + ": saved wealth was put at risk");
    result.check(expected == 1,
                 config.label + ": E[combined e-value] = " + format_rational(expected));
  }
  result.note(std::to_string(configs.size()) +
              " bet-and-save configurations: per-path identity exact, combined e-value has "
              "expectation exactly 1");
  return result;
}

// ---------------------------------------------------------------------------
// leverage suite
// ---------------------------------------------------------------------------

inline DiscreteBet random_bet(SplitMix64& rng, size_t max_support) {
  const size_t k = 2 + rng.next_below(max_support - 1);
  std::set<Rational> distinct;
  while (distinct.size() < k) {
    const int64_t num = static_cast<int64_t>(rng.next_below(25)) - 12;
    const int64_t den = 1 + static_cast<int64_t>(rng.next_below(4));
    distinct.insert(Rational(num, den));
  }
  std::vector<Rational> values(distinct.begin(), distinct.end());
  std::vector<Rational> p, q;
  Rational p_sum(0), q_sum(0);
  for (size_t i = 0; i < k; ++i) {
    p.push_back(Rational(1 + rng.next_below(9)));  // strictly positive: Q-support stays inside P
    q.push_back(Rational(rng.next_below(10)));
    p_sum += p.back();
    q_sum += q.back();
  }
  if (q_sum == 0) {
    q[0] = 1;
    q_sum = 1;
  }
  for (size_t i = 0; i < k; ++i) {
    p[i] /= p_sum;
    q[i] /= q_sum;
  }
  return DiscreteBet::make(std::move(values), std::move(p), std::move(q));
}

inline SuiteResult suite_leverage(size_t instances, size_t spot_checks, uint64_t seed) {
  SuiteResult result;
  result.name = "leverage";
  SplitMix64 rng(seed);
  size_t below_minus_one = 0;
  for (size_t i = 0; i < instances; ++i) {
    const DiscreteBet bet = random_bet(rng, 6);
    Rational borrow;
    if (i % 5 == 4) {  // a slice of the corpus uses multipliers below -1
      borrow = Rational(-1) - Rational(1 + rng.next_below(8), 4);
      ++below_minus_one;
    } else {
      borrow = Rational(-1) + Rational(1 + rng.next_below(24), 4);
    }

    const auto base = evidence_functional(bet);
    const auto mapped = evidence_functional(leverage_map(bet, borrow));
    result.check(base.bounded && mapped.bounded,
                 "instance " + std::to_string(i) + ": unexpected unbounded value");
    result.check(base.value == mapped.value,
                 "instance " + std::to_string(i) + ": value changed under borrow " +
                     format_rational(borrow) + " (" + format_rational(base.value) + " vs " +
                     format_rational(mapped.value) + ")");

    // constraint soundness at the returned optimum, straight from the tails
    for (size_t a = 0; a < bet.size(); ++a) {
      const Rational z = base.scale * bet.values[a] + base.shift;
      if (z <= 0) continue;
      Rational tail(0);
      for (size_t b = 0; b < bet.size(); ++b)
        if (base.scale * bet.values[b] + base.shift >= z) tail += bet.p_weights[b];
      result.check(tail * z <= 1, "instance " + std::to_string(i) + ": argmax infeasible");
    }

    try {
      const SharpeRatio s = sharpe(bet);
      const SharpeRatio sm = sharpe(leverage_map(bet, borrow));
      if (s.excess_mean != 0)
        result.check(s.squared() == sm.squared(),
                     "instance " + std::to_string(i) + ": squared Sharpe not invariant");
    } catch (const std::domain_error&) {
      // constant under P: Sharpe undefined, nothing to compare
    }
  }
  result.check(below_minus_one > 0, "corpus must include multipliers below -1");

  SplitMix64 spot_rng(substream_seed(seed, 9));
  double worst = 0;
  for (size_t i = 0; i < spot_checks; ++i) {
    const DiscreteBet bet = random_bet(spot_rng, 5);
    const auto exact = evidence_functional(bet);
    const double grid = grid_search_evidence(bet);
    const double gap = std::abs(to_double(exact.value) - grid);
    const double tolerance = 1e-3 * (1.0 + std::abs(to_double(bet.q_mean())));
    worst = std::max(worst, gap);
    result.check(gap <= tolerance, "spot " + std::to_string(i) + ": grid gap " +
                                       std::to_string(gap) + " above tolerance");
    result.check(grid <= to_double(exact.value) + 1e-9,
                 "spot " + std::to_string(i) + ": grid beat the exact optimum");
  }
  std::ostringstream line;
  line << instances << " leverage instances invariant (exact); " << spot_checks
       << " grid audits agree (worst gap " << worst << ")";
  result.note(line.str());
  return result;
}

// ---------------------------------------------------------------------------
// bonus-odds / almost-supermartingale suite
// ---------------------------------------------------------------------------

inline SuiteResult suite_mispricing(size_t horizon, uint64_t seed) {
  SuiteResult result;
  result.name = "mispricing";
  const Rational tenth(1, 10);
  const PayoffSchedule bonus = PayoffSchedule::flat(tenth);
  const PayoffSchedule fair;

  // simple liabilities under bonus odds: net wealth rises on every path,
  // carrying no information about the coin at all
  {
    const auto strategy = arbitrage_strategy<Rational>(Rational(1));
    const oracle::PathEnsemble ensemble(std::min<size_t>(horizon, 6), Rational(1, 2));
    bool strictly_increasing = true;
    oracle::walk(strategy, bonus, ensemble, [&](const Ledger<Rational>& led, const Rational&) {
      const size_t t = led.rounds();
      if (t > 0 && led.net()[t] <= led.net()[t - 1]) strictly_increasing = false;
      return true;
    });
    result.check(strictly_increasing, "arbitrage net wealth failed to rise on some path");

    // with interest-bearing liabilities the adjusted net is flat at 1
    oracle::WalkOptions opt;
    opt.compound = true;
    bool flat = true;
    oracle::walk(
        strategy, bonus, ensemble,
        [&](const Ledger<Rational>& led, const Rational&) {
          if (led.adj_net().back() != 1) flat = false;
          return true;
        },
        opt);
    result.check(flat, "arbitrage adjusted net wealth is not constant 1");
  }

  // adjusted Doob decomposition for betting strategies under bonus odds
  for (const auto& strategy :
       {constant_strategy<Rational>(Rational(1, 2), Rational(1)),
        arbitrage_strategy<Rational>(Rational(2)),
        random_strategy<Rational>(substream_seed(seed, 5), true)}) {
    const oracle::PathEnsemble ensemble(std::min<size_t>(horizon, 6), Rational(1, 2));
    const auto doob = oracle::doob_check(strategy, bonus, ensemble, /*adjusted=*/true);
    result.check(doob.pass(), strategy.name + " adjusted decomposition: " + doob.detail);
  }

  // sequential certificate with the bonus slack term
  {
    const auto strategy = constant_strategy<Rational>(Rational(1, 2), Rational(1));
    const oracle::PathEnsemble ensemble(horizon, Rational(1, 2));
    const AssumptionReport report = oracle::attest(strategy, bonus, ensemble);
    const auto cert = certify_gross_sequential(*report.positive_borrow_bound,
                                               *report.bonus_total, report);
    const auto check =
        oracle::verify_certificate(strategy, bonus, ensemble, oracle::gross_value(), cert);
    result.check(check.pass, "bonus-odds sequential certificate: " + check.detail);

    // interest-adjusted net wealth supports the same floor certificates as
    // the fair game's net wealth
    oracle::WalkOptions opt;
    opt.compound = true;
    const auto adjusted = certify_net(*report.adjusted_net_floor, WealthSubject::AdjustedNet,
                                      EvidenceKind::Sequential, report);
    const auto adjusted_check = oracle::verify_certificate(
        strategy, bonus, ensemble, oracle::adjusted_net_value(), adjusted, {}, nullptr, opt);
    result.check(adjusted_check.pass,
                 "adjusted net-floor certificate: " + adjusted_check.detail);
  }

  // almost-supermartingale decompositions and their maximal bound
  {
    // plain nonnegative martingale: all drivers zero
    const auto strategy = constant_strategy<Rational>(Rational(1, 2), Rational(0));
    const oracle::PathEnsemble ensemble(std::min<size_t>(horizon, 6), Rational(1, 2));
    auto zero = [](const Ledger<Rational>&) { return Rational(0); };
    const auto report = oracle::robbins_siegmund_check(strategy, fair, ensemble,
                                                       oracle::gross_value(), zero, zero, zero);
    result.check(report.pass(), "no-borrow wealth: " + report.decomposition_detail +
                                    report.bound_detail);
  }
  {
    // fair borrowed wealth: gains are the positive borrow parts
    const auto strategy = random_strategy<Rational>(substream_seed(seed, 6), false);
    const oracle::PathEnsemble ensemble(std::min<size_t>(horizon, 6), Rational(1, 2));
    auto zero = [](const Ledger<Rational>&) { return Rational(0); };
    auto gain = [strategy](const Ledger<Rational>& past) {
      const Rational b = strategy.decide(past).borrow;
      return b > 0 ? b : Rational(0);
    };
    auto drain = [strategy](const Ledger<Rational>& past) {
      const Rational b = strategy.decide(past).borrow;
      return b < 0 ? Rational(-b) : Rational(0);
    };
    const auto report = oracle::robbins_siegmund_check(strategy, fair, ensemble,
                                                       oracle::gross_value(), zero, gain, drain);
    result.check(report.pass(), "borrowed wealth: " + report.decomposition_detail +
                                    report.bound_detail);
  }
  {
    // bonus odds: growth is the bonus, gains carry the bonus factor
    const auto strategy = constant_strategy<Rational>(Rational(1, 2), Rational(1));
    const oracle::PathEnsemble ensemble(3, Rational(1, 2));
    auto growth = [tenth](const Ledger<Rational>&) { return tenth; };
    auto gain = [strategy, tenth](const Ledger<Rational>& past) {
      const Rational b = strategy.decide(past).borrow;
      return b > 0 ? (Rational(1) + tenth) * b : Rational(0);
    };
    auto drain = [strategy, tenth](const Ledger<Rational>& past) {
      const Rational b = strategy.decide(past).borrow;
      return b < 0 ? (Rational(1) + tenth) * -b : Rational(0);
    };
    const auto report = oracle::robbins_siegmund_check(strategy, bonus, ensemble,
                                                       oracle::gross_value(), growth, gain,
                                                       drain);
    result.check(report.pass(), "bonus-odds wealth: " + report.decomposition_detail +
                                    report.bound_detail);
  }
  result.note("arbitrage pathology, adjusted decomposition, bonus certificate and "
              "almost-supermartingale bounds all verified exactly");
  return result;
}

}  // namespace ebb::verify
