// Standardized evidence of a one-shot bet is blind to leverage: borrowing
// beta and staking 1+beta rescales the payoff affinely, and the optimal
// standardization undoes it exactly.

#include <iostream>

#include "ebb/leverage.hpp"

using namespace ebb;

int main() {
  const auto bet = DiscreteBet::make({Rational(0), Rational(2)},
                                     {Rational(1, 2), Rational(1, 2)},
                                     {Rational(1, 10), Rational(9, 10)});
  const auto base = evidence_functional(bet);
  std::cout << "value " << format_rational(base.value) << " at a="
            << format_rational(base.scale) << ", b=" << format_rational(base.shift) << "\n";

  for (const Rational& beta : {Rational(1), Rational(5), Rational(-1, 2), Rational(-3)}) {
    const auto mapped = evidence_functional(leverage_map(bet, beta));
    std::cout << "  borrow " << format_rational(beta) << ": value "
              << format_rational(mapped.value)
              << (mapped.value == base.value ? " (invariant)" : " (CHANGED)") << "\n";
    if (mapped.value != base.value) return 1;
  }
  std::cout << "grid audit: " << grid_search_evidence(bet) << "\n";
  return 0;
}
