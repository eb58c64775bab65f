#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ebb/oracle.hpp"
#include "ebb/strategies.hpp"

using namespace ebb;

namespace {
Rational R(long long n, long long d = 1) { return Rational(n, d); }
const PayoffSchedule kFair;

Path mask_path(uint32_t mask, size_t rounds) {
  Path p;
  for (size_t i = 0; i < rounds; ++i)
    p.push_back((mask >> i) & 1 ? Outcome::heads() : Outcome::tails());
  return p;
}
}  // namespace

TEST_CASE("constant strategies") {
  SUBCASE("the two-round reference strategy") {
    const auto ledger =
        run_game(constant_strategy<Rational>(R(1, 2), R(1)), parse_path("+1,+1"));
    CHECK(ledger.gross().back() == 6);
    CHECK(ledger.net().back() == 4);
  }
  SUBCASE("idle never moves") {
    const auto ledger = run_game(idle_strategy<Rational>(), parse_path("-1,+1,-1"));
    CHECK(ledger.gross() == std::vector<Rational>(4, R(1)));
  }
  SUBCASE("all-in doubling dies at the first tail") {
    const auto ledger =
        run_game(constant_strategy<Rational>(R(1), R(0)), parse_path("+1,+1,-1,+1"));
    CHECK(ledger.gross() == std::vector<Rational>{R(1), R(2), R(4), R(0), R(0)});
  }
  SUBCASE("fractions outside [-1,1] are rejected at construction") {
    CHECK_THROWS_AS(constant_strategy<Rational>(R(3, 2), R(0)), std::invalid_argument);
  }
}

TEST_CASE("floor guard") {
  SUBCASE("slack constraint leaves the base alone") {
    const auto base = constant_strategy<Rational>(R(1, 2), R(1));
    const auto guarded = net_floor_guard(base, R(-1));
    for (uint32_t mask = 0; mask < 4; ++mask) {
      const auto a = run_game(base, mask_path(mask, 2));
      const auto b = run_game(guarded, mask_path(mask, 2));
      CHECK(a.gross() == b.gross());
      CHECK(a.liabilities() == b.liabilities());
    }
  }
  SUBCASE("idle base stays idle under any floor") {
    const auto guarded = net_floor_guard(idle_strategy<Rational>(), R(1) - R(1, 1000));
    const auto ledger = run_game(guarded, parse_path("+1,-1"));
    CHECK(ledger.gross() == std::vector<Rational>{R(1), R(1), R(1)});
  }
  SUBCASE("an aggressive base is cut to the exact floor") {
    const auto guarded = net_floor_guard(constant_strategy<Rational>(R(1), R(10)), R(-1));
    // round 1: gross 1, liabilities 0: largest admissible borrow at full
    // stake satisfies (1+b)(1-1) - b = -b >= -1, so b = 1
    const auto d = guarded.decide(Ledger<Rational>{});
    CHECK(d.borrow == 1);
    CHECK(d.fraction == 1);
    // worst case realizes the floor exactly
    const auto down = run_game(guarded, parse_path("-1"));
    CHECK(down.net().back() == -1);
  }
  SUBCASE("oracle confirms the floor pathwise at depth") {
    const auto guarded =
        net_floor_guard(random_strategy<Rational>(5, false), R(-2));
    const oracle::PathEnsemble ensemble(8, R(1, 2));
    CHECK(oracle::pathwise_minimum(guarded, kFair, ensemble, oracle::net_value()) >= -2);
  }
}

TEST_CASE("arbitrage strategy") {
  SUBCASE("risk-free growth on every path") {
    const auto schedule = PayoffSchedule::flat(R(1, 10));
    const auto strategy = arbitrage_strategy<Rational>(R(0));
    for (uint32_t mask = 0; mask < 8; ++mask) {
      const auto ledger = run_game(strategy, mask_path(mask, 3), schedule);
      CHECK(ledger.gross() ==
            std::vector<Rational>{R(1), R(11, 10), R(121, 100), R(1331, 1000)});
    }
  }
  SUBCASE("fair odds make it inert") {
    const auto ledger = run_game(arbitrage_strategy<Rational>(R(0)), parse_path("+1,-1"));
    CHECK(ledger.gross() == std::vector<Rational>{R(1), R(1), R(1)});
  }
  SUBCASE("borrowing under bonus odds inflates net wealth on every path") {
    const auto schedule = PayoffSchedule::flat(R(1, 10));
    const auto strategy = arbitrage_strategy<Rational>(R(1));
    for (uint32_t mask = 0; mask < 16; ++mask) {
      const auto ledger = run_game(strategy, mask_path(mask, 4), schedule);
      for (size_t t = 1; t <= 4; ++t) {
        CHECK(ledger.net()[t] > ledger.net()[t - 1]);
        CHECK(ledger.net()[t] - ledger.net()[t - 1] ==
              (ledger.gross()[t - 1] + 1) * R(1, 10));
      }
    }
  }
}

TEST_CASE("bet and save") {
  SUBCASE("one period, all in: proceeds are 0 or 2") {
    const auto schedule = SaveSchedule<Rational>::fixed({1}, {R(1)});
    const auto strategy = bet_and_save<Rational>(
        schedule, [](const Ledger<Rational>&, size_t) { return R(1); });
    const auto up = run_game(strategy, parse_path("+1"));
    CHECK(period_e_values(up, schedule).period_values == std::vector<Rational>{R(2)});
    const auto down = run_game(strategy, parse_path("-1"));
    CHECK(period_e_values(down, schedule).period_values == std::vector<Rational>{R(0)});
  }
  SUBCASE("two one-round periods average with equal weights") {
    const auto schedule = SaveSchedule<Rational>::fixed({1, 2}, {R(1), R(1)});
    const auto strategy = bet_and_save<Rational>(
        schedule, [](const Ledger<Rational>&, size_t) { return R(1); });
    const auto ledger = run_game(strategy, parse_path("+1,+1"));
    const auto ev = period_e_values(ledger, schedule);
    CHECK(ev.period_values == std::vector<Rational>{R(2), R(2)});
    CHECK(ev.combined == 2);
    CHECK(ev.net_based == 2);
    std::map<std::pair<int, int>, Rational> expected{
        {{+1, +1}, R(2)}, {{+1, -1}, R(1)}, {{-1, +1}, R(1)}, {{-1, -1}, R(0)}};
    for (const auto& [key, value] : expected) {
      const Path path{Outcome(key.first), Outcome(key.second)};
      CHECK(period_e_values(run_game(strategy, path), schedule).combined == value);
    }
  }
  SUBCASE("no inner bets: every period returns its tranche intact") {
    const auto schedule = SaveSchedule<Rational>::fixed({2, 4}, {R(1), R(2)});
    const auto strategy = bet_and_save<Rational>(
        schedule, [](const Ledger<Rational>&, size_t) { return R(0); });
    const auto ledger = run_game(strategy, parse_path("+1,-1,-1,+1"));
    const auto ev = period_e_values(ledger, schedule);
    CHECK(ev.period_values == std::vector<Rational>{R(1), R(1)});
    CHECK(ev.combined == 1);
  }
  SUBCASE("saved wealth is never below the last save point") {
    const auto schedule = SaveSchedule<Rational>::fixed({2, 4, 6}, {R(1), R(1), R(1)});
    const auto strategy = bet_and_save<Rational>(
        schedule, [](const Ledger<Rational>& past, size_t period) {
          return period % 2 == 0 ? R(1) : R(-1, 2 + static_cast<long long>(past.rounds() % 2));
        });
    for (uint32_t mask = 0; mask < 64; ++mask) {
      const auto ledger = run_game(strategy, mask_path(mask, 6));
      const auto times = resolve_save_point(ledger, schedule).save_times;
      REQUIRE(times.size() == 3);
      size_t period = 0;
      for (size_t t = 1; t <= 6; ++t) {
        const size_t start = period == 0 ? 0 : times[period - 1];
        CHECK(ledger.gross()[t] >= ledger.gross()[start]);
        if (t == times[period]) ++period;
      }
    }
  }
  SUBCASE("the strategy sits out after the last save time") {
    const auto schedule = SaveSchedule<Rational>::fixed({1}, {R(1)});
    const auto strategy = bet_and_save<Rational>(
        schedule, [](const Ledger<Rational>&, size_t) { return R(1); });
    const auto ledger = run_game(strategy, parse_path("+1,+1,-1"));
    CHECK(ledger.gross()[1] == ledger.gross()[3]);
    CHECK(ledger.liabilities().back() == 1);
  }
  SUBCASE("a horizon short of the last save time is reported") {
    const auto schedule = SaveSchedule<Rational>::fixed({2, 4}, {R(1), R(1)});
    const auto strategy = bet_and_save<Rational>(
        schedule, [](const Ledger<Rational>&, size_t) { return R(1); });
    const auto ledger = run_game(strategy, parse_path("+1,+1"));
    CHECK_THROWS_AS(period_e_values(ledger, schedule), std::invalid_argument);
  }
  SUBCASE("schedule validation") {
    CHECK_THROWS_AS(SaveSchedule<Rational>::fixed({2, 2}, {R(1), R(1)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(SaveSchedule<Rational>::fixed({1}, {R(0)}), std::invalid_argument);
    CHECK_THROWS_AS(SaveSchedule<Rational>::fixed({1, 2}, {R(1)}), std::invalid_argument);
  }
}

TEST_CASE("combined e-value has expectation one, exactly") {
  const auto schedule = SaveSchedule<Rational>::fixed({1, 3}, {R(1), R(2)});
  const auto strategy = bet_and_save<Rational>(
      schedule, [](const Ledger<Rational>&, size_t period) {
        return period == 0 ? R(1) : R(1, 2);
      });
  const oracle::PathEnsemble ensemble(3, R(1, 2));
  const Rational mean = oracle::expectation(
      strategy, kFair, ensemble,
      [&](const Ledger<Rational>& led) { return period_e_values(led, schedule).combined; });
  CHECK(mean == 1);
}

TEST_CASE("each period value has conditional expectation one at its start") {
  const auto schedule = SaveSchedule<Rational>::fixed({1, 3}, {R(1), R(2)});
  const auto strategy = bet_and_save<Rational>(
      schedule, [](const Ledger<Rational>&, size_t period) {
        return period == 0 ? R(1) : R(-1, 2);
      });
  // period 1 spans rounds 2..3; its start prefix is the first toss
  for (int first : {+1, -1}) {
    Rational mean(0);
    for (uint32_t rest = 0; rest < 4; ++rest) {
      Path path{Outcome(first), Outcome((rest & 1) ? 1 : -1), Outcome((rest & 2) ? 1 : -1)};
      const auto ev = period_e_values(run_game(strategy, path), schedule);
      mean += R(1, 4) * ev.period_values[1];
    }
    CHECK(mean == 1);
  }
  // period 0 spans round 1 only
  Rational mean0(0);
  for (int first : {+1, -1}) {
    Path path{Outcome(first), Outcome::heads(), Outcome::heads()};
    mean0 += R(1, 2) * period_e_values(run_game(strategy, path), schedule).period_values[0];
  }
  CHECK(mean0 == 1);
}

TEST_CASE("strategy specs") {
  SUBCASE("round trips through the parser") {
    const auto parsed = parse_strategy<Rational>("constant:lambda=1/2,beta=1");
    const auto ledger = run_game(parsed.strategy, parse_path("-1,+1"));
    CHECK(ledger.gross().back() == 3);
    CHECK_FALSE(parsed.schedule.has_value());
  }
  SUBCASE("arbitrage spec carries its bonus") {
    const auto parsed = parse_strategy<Rational>("arbitrage:beta=0,b=1/10");
    REQUIRE(parsed.schedule.has_value());
    CHECK(parsed.schedule->bonus(1) == R(1, 10));
  }
  SUBCASE("betsave spec builds fixed save times") {
    const auto parsed = parse_strategy<Rational>("betsave:saves=1;2,borrows=1;1,mu=1");
    const auto ledger = run_game(parsed.strategy, parse_path("+1,+1"));
    CHECK(ledger.gross().back() == 5);
  }
  SUBCASE("guard and random specs parse") {
    CHECK_NOTHROW(parse_strategy<Rational>("guard:lambda=1,beta=10,nmin=-1"));
    CHECK_NOTHROW(parse_strategy<Rational>("random:seed=7,nonneg=1"));
    CHECK_NOTHROW(parse_strategy<double>("constant:lambda=1/2,beta=1"));
  }
  SUBCASE("bad specs are rejected") {
    CHECK_THROWS_AS(parse_strategy<Rational>("nosuch"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy<Rational>("constant:lambda=0.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy<Rational>("constant:oops=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy<Rational>("betsave:saves=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_strategy<Rational>("constant:lambda"), std::invalid_argument);
  }
}

TEST_CASE("eta weight specs") {
  CHECK(parse_eta<Rational>("unit").weight(Ledger<Rational>{}) == 1);
  CHECK_NOTHROW(parse_eta<Rational>("losspenalty"));
  CHECK_THROWS_AS(parse_eta<Rational>("nope"), std::invalid_argument);
}
