#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ebb/io.hpp"
#include "ebb/oracle.hpp"
#include "ebb/simulate.hpp"

using namespace ebb;
using namespace ebb::sim;

namespace {
SimConfig base_config() {
  SimConfig config;
  config.horizon = 6;
  config.replications = 20000;
  config.seed = 99;
  config.strategy_spec = "constant:lambda=1,beta=0";
  config.grid = {2.0, 4.0};
  return config;
}

std::string serialized(const SimReport& report) {
  std::ostringstream os;
  io::write_sim_csv(os, report, {});
  os << io::sim_summary_json(report).dump();
  return os.str();
}
}  // namespace

TEST_CASE("identical seeds give bit-identical reports") {
  const auto a = run_mc(base_config());
  const auto b = run_mc(base_config());
  CHECK(serialized(a) == serialized(b));
  auto other = base_config();
  other.seed = 100;
  CHECK(serialized(run_mc(other)) != serialized(a));
}

TEST_CASE("worker count does not change the numbers") {
  auto config = base_config();
  config.replications = 5000;
  const auto serial = run_mc(config);
  config.workers = 2;
  const auto threaded = run_mc(config);
  CHECK(serialized(serial) == serialized(threaded));
}

TEST_CASE("idle strategy: the tail curve is a step at one") {
  SimConfig config = base_config();
  config.strategy_spec = "idle";
  config.replications = 500;
  config.grid = {0.5, 1.0, 1.0000001, 2.0};
  const auto report = run_mc(config);
  CHECK(report.tail[0] == 1.0);
  CHECK(report.tail[1] == 1.0);
  CHECK(report.tail[2] == 0.0);
  CHECK(report.tail[3] == 0.0);
  CHECK(report.standardized_mean == 1.0);
}

TEST_CASE("doubling tails agree with the exact values within sampling error") {
  auto config = base_config();
  config.replications = 100000;
  const auto report = run_mc(config);
  // exact: Pr(sup >= 2^k) = 2^-k
  const double n = static_cast<double>(config.replications);
  for (size_t g = 0; g < report.grid.size(); ++g) {
    const double exact = 1.0 / report.grid[g];
    const double se = std::sqrt(exact * (1 - exact) / n);
    CHECK(std::abs(report.tail[g] - exact) <= 4 * se);
  }
}

TEST_CASE("bonus-odds tails agree with the oracle at gap midpoints") {
  // the bonus factor 11/10 is not a dyadic rational, so the double lane
  // rounds; levels are taken strictly inside gaps of the exact running-max
  // distribution where rounding cannot flip the comparison
  const auto parsed = parse_strategy<Rational>("constant:lambda=1/2,beta=1");
  const PayoffSchedule schedule = PayoffSchedule::flat(Rational(1, 10));
  const oracle::PathEnsemble ensemble(6, Rational(1, 2));
  const auto dist = oracle::running_max_distribution(parsed.strategy, schedule, ensemble,
                                                     oracle::gross_value());
  REQUIRE(dist.size() >= 8);
  std::vector<Rational> levels;
  for (size_t i : {dist.size() / 4, dist.size() / 2, dist.size() - 2})
    levels.push_back((dist[i].first + dist[i + 1].first) / 2);

  SimConfig config;
  config.horizon = 6;
  config.replications = 100000;
  config.seed = 2718;
  config.strategy_spec = "constant:lambda=1/2,beta=1";
  config.bonus = "1/10";
  for (const Rational& x : levels) config.grid.push_back(to_double(x));
  const auto report = run_mc(config);

  for (size_t g = 0; g < levels.size(); ++g) {
    const double exact = to_double(oracle::tail_probability(dist, levels[g]));
    const double se = std::sqrt(exact * (1 - exact) / 100000.0);
    CHECK(std::abs(report.tail[g] - exact) <= 4 * se + 1e-12);
  }
}

TEST_CASE("null validity: empirical tails stay under the certificate bound") {
  // no borrowing: the unit certificate bounds the running maximum by 1/x
  auto config = base_config();
  config.replications = 50000;
  config.grid = {2.0, 3.0, 4.0, 8.0, 16.0};
  const auto report = run_mc(config);
  for (size_t g = 0; g < report.grid.size(); ++g)
    CHECK(report.tail[g] <= 1.0 / report.grid[g] + 3.0 * report.stderrs[g] + 1e-12);
}

TEST_CASE("standardized terminal means track the oracle, fair and tilted") {
  SimConfig config;
  config.horizon = 2;
  config.replications = 200000;
  config.seed = 31337;
  config.strategy_spec = "constant:lambda=1/2,beta=1";
  config.track = Track::Net;
  config.standardize_scale = Rational(2);
  config.standardize_shift = Rational(-1);

  SUBCASE("fair coin: mean is one") {
    const auto report = run_mc(config);
    CHECK(report.standardized_mean == doctest::Approx(1.0).epsilon(0.02));
  }
  SUBCASE("tilted coin: mean matches the exact alternative expectation") {
    config.bias = Rational(3, 4);
    const auto report = run_mc(config);
    // oracle: E[(N_2+1)/2] under bias 3/4
    const oracle::PathEnsemble ensemble(2, Rational(3, 4));
    const Rational exact = oracle::expectation(
        constant_strategy<Rational>(Rational(1, 2), Rational(1)), PayoffSchedule{}, ensemble,
        [](const Ledger<Rational>& led) {
          return (led.net().back() + 1) / Rational(2);
        });
    CHECK(exact == Rational(27, 16));
    CHECK(report.standardized_mean == doctest::Approx(to_double(exact)).epsilon(0.02));
  }
}

TEST_CASE("substreams depend on the replication index, not the worker") {
  // neighbouring replications see different coins
  SimConfig config = base_config();
  config.replications = 64;
  config.strategy_spec = "constant:lambda=1,beta=0";
  const auto report = run_mc(config);
  bool any_difference = false;
  for (size_t i = 1; i < report.terminal.size(); ++i)
    any_difference = any_difference || report.terminal[i] != report.terminal[0];
  CHECK(any_difference);
}

TEST_CASE("bonus odds feed through the strategy spec string") {
  SimConfig config;
  config.horizon = 3;
  config.replications = 10;
  config.seed = 5;
  config.strategy_spec = "arbitrage:beta=0,b=1/10";
  const auto report = run_mc(config);
  for (double w : report.terminal) CHECK(w == doctest::Approx(1.331).epsilon(1e-12));
}

TEST_CASE("configuration validation") {
  SimConfig config = base_config();
  config.replications = 0;
  CHECK_THROWS_AS(run_mc(config), std::invalid_argument);
  config = base_config();
  config.bias = Rational(3, 2);
  CHECK_THROWS_AS(run_mc(config), std::invalid_argument);
  config = base_config();
  config.strategy_spec = "nosuch";
  CHECK_THROWS_AS(run_mc(config), std::invalid_argument);
}
