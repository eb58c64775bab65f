#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ebb/game.hpp"
#include "ebb/random.hpp"
#include "ebb/rational.hpp"
#include "ebb/strategies.hpp"

// Seeded Monte Carlo for horizons beyond the exact-enumeration cap. Ledgers
// here are double precision: sampling error dominates rounding, and every
// correctness claim is routed through the exact engine instead.
namespace ebb::sim {

enum class Track { Gross, Net };

inline const char* to_string(Track t) { return t == Track::Gross ? "gross" : "net"; }

struct SimConfig {
  size_t horizon = 8;
  size_t replications = 100000;
  Rational bias{1, 2};
  uint64_t seed = 1;
  std::string strategy_spec = "idle";
  std::string bonus;  // flat bonus as a rational string, empty = fair
  Track track = Track::Gross;
  // terminal values are reported standardized as (value - shift) / scale
  Rational standardize_scale{1};
  Rational standardize_shift{0};
  std::vector<double> grid;  // levels for the running-max tail curve
  size_t workers = 1;
};

struct SimReport {
  // resolved configuration
  size_t horizon = 0;
  size_t replications = 0;
  uint64_t seed = 0;
  std::string strategy;
  std::string bias;
  std::string track;

  std::vector<double> grid;
  std::vector<size_t> exceed_counts;  // replications with sup >= grid level
  std::vector<double> tail;           // exceed_counts / R
  std::vector<double> stderrs;        // binomial standard errors
  double standardized_mean = 0;
  std::vector<double> supremum;  // per replication: max_t of the tracked value
  std::vector<double> terminal;  // per replication: tracked value at T
};

namespace detail {

// Exact heads threshold on 64-bit draws; a step below 2^-63 of bias error is
// far below any Monte Carlo resolution.
inline uint64_t heads_threshold(const Rational& bias) {
  if (bias == 1) return ~uint64_t{0};
  const BigInt scaled = (numerator(bias) << 64) / denominator(bias);
  return scaled.convert_to<uint64_t>();
}

}  // namespace detail

// Runs the configured game `replications` times. Replication i draws its
// coins from substream_seed(seed, i), so the report is a pure function of
// the configuration no matter how many workers share the loop; aggregation
// happens once, in replication order.
inline SimReport run_mc(const SimConfig& config) {
  if (config.replications < 1) throw std::invalid_argument("run_mc: need replications >= 1");
  if (config.bias < 0 || config.bias > 1) throw std::invalid_argument("run_mc: bias outside [0,1]");
  if (config.standardize_scale <= 0)
    throw std::invalid_argument("run_mc: standardize scale must be positive");

  ParsedStrategy<double> parsed = parse_strategy<double>(config.strategy_spec);
  PayoffSchedule schedule = parsed.schedule.value_or(PayoffSchedule{});
  if (!config.bonus.empty()) schedule = PayoffSchedule::flat(parse_rational(config.bonus));

  SimReport report;
  report.horizon = config.horizon;
  report.replications = config.replications;
  report.seed = config.seed;
  report.strategy = parsed.strategy.name;
  report.bias = format_rational(config.bias);
  report.track = to_string(config.track);
  report.grid = config.grid;
  report.supremum.resize(config.replications);
  report.terminal.resize(config.replications);

  const uint64_t threshold = detail::heads_threshold(config.bias);
  const bool heads_always = config.bias == 1;

  auto run_range = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      SplitMix64 rng(substream_seed(config.seed, i));
      Ledger<double> ledger;
      auto value = [&] {
        return config.track == Track::Gross ? ledger.gross().back() : ledger.net().back();
      };
      double sup = value();
      for (size_t t = 1; t <= config.horizon; ++t) {
        const BetDecision<double> d = parsed.strategy.decide(ledger);
        const uint64_t u = rng.next();
        const Outcome x = (heads_always || u < threshold) ? Outcome::heads() : Outcome::tails();
        ledger.apply(d, x, value_cast<double>(schedule.bonus(t)));
        sup = std::max(sup, value());
      }
      report.supremum[i] = sup;
      report.terminal[i] = value();
    }
  };

  const size_t workers = std::max<size_t>(1, std::min(config.workers, config.replications));
  if (workers == 1) {
    run_range(0, config.replications);
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (config.replications + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
      const size_t begin = w * chunk;
      const size_t end = std::min(config.replications, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }

  // order-fixed aggregation: identical output for any worker count
  const double scale = to_double(config.standardize_scale);
  const double shift = to_double(config.standardize_shift);
  double sum = 0;
  for (size_t i = 0; i < config.replications; ++i) sum += (report.terminal[i] - shift) / scale;
  report.standardized_mean = sum / static_cast<double>(config.replications);

  report.exceed_counts.assign(report.grid.size(), 0);
  for (size_t g = 0; g < report.grid.size(); ++g)
    for (size_t i = 0; i < config.replications; ++i)
      if (report.supremum[i] >= report.grid[g]) report.exceed_counts[g] += 1;
  report.tail.resize(report.grid.size());
  report.stderrs.resize(report.grid.size());
  const double n = static_cast<double>(config.replications);
  for (size_t g = 0; g < report.grid.size(); ++g) {
    const double phat = static_cast<double>(report.exceed_counts[g]) / n;
    report.tail[g] = phat;
    report.stderrs[g] = std::sqrt(phat * (1.0 - phat) / n);
  }
  return report;
}

}  // namespace ebb::sim
