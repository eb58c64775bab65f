// The bet-and-save construction: borrow a tranche per period, never risk the
// savings, and read the final wealth as a weighted average of per-period
// e-values. The two readings agree path by path.

#include <iostream>

#include "ebb/oracle.hpp"
#include "ebb/strategies.hpp"

using namespace ebb;

int main() {
  const auto schedule = SaveSchedule<Rational>::fixed({2, 4}, {Rational(1), Rational(2)});
  const auto strategy = bet_and_save<Rational>(
      schedule, [](const Ledger<Rational>&, size_t period) {
        return period == 0 ? Rational(1) : Rational(1, 2);
      });

  const oracle::PathEnsemble ensemble(4, Rational(1, 2));
  Rational mean(0);
  oracle::walk(strategy, {}, ensemble, [&](const Ledger<Rational>& led, const Rational& w) {
    if (led.rounds() < ensemble.horizon) return true;
    const PeriodEvidence ev = period_e_values(led, schedule);
    std::cout << format_path(led.outcomes()) << ": periods ";
    for (const Rational& e : ev.period_values) std::cout << format_rational(e) << " ";
    std::cout << "-> combined " << format_rational(ev.combined) << " (net-based "
              << format_rational(ev.net_based) << ")\n";
    mean += w * ev.combined;
    return true;
  });
  std::cout << "expected combined e-value: " << format_rational(mean) << "\n";
  return mean == 1 ? 0 : 1;
}
