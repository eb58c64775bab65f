// Play a borrowed-betting game, attach the optional ledgers, and certify the
// net wealth above its exact floor — everything in exact arithmetic.

#include <iostream>

#include "ebb/evidence.hpp"
#include "ebb/io.hpp"
#include "ebb/oracle.hpp"
#include "ebb/strategies.hpp"

using namespace ebb;

int main() {
  // borrow 1 and bet half the table each round
  const auto strategy = constant_strategy<Rational>(Rational(1, 2), Rational(1));

  // one explicit play-through, with sub-liabilities weighted after losses
  const Path path = parse_path("-1,+1,+1");
  auto ledger = attach_sub_liabilities(run_game(strategy, path),
                                       loss_penalty_weights<Rational>());
  io::write_ledger_csv(std::cout, ledger);

  // the exact law over every path at horizon 3, fair coin
  const oracle::PathEnsemble ensemble(3, Rational(1, 2));
  std::cout << "\nE[W_3] = "
            << format_rational(oracle::expectation(strategy, {}, ensemble,
                                                   oracle::gross_value()))
            << ", E[N_3] = "
            << format_rational(oracle::expectation(strategy, {}, ensemble,
                                                   oracle::net_value()))
            << "\n";

  // certify net wealth above its exact pathwise floor and verify the claim
  const AssumptionReport report = oracle::attest(strategy, {}, ensemble);
  const auto cert = certify_net(*report.net_floor, WealthSubject::Net,
                                EvidenceKind::Sequential, report);
  const auto check =
      oracle::verify_certificate(strategy, {}, ensemble, oracle::net_value(), cert);
  std::cout << "net wealth >= " << format_rational(cert.b) << " certificate: "
            << (check.pass ? "verified" : "refuted") << "\n";
  std::cout << "tail bound at 4: Pr(sup N >= 4) <= "
            << format_rational(tail_bound(cert, Rational(4))) << ", exact "
            << format_rational(oracle::maximal_probability(strategy, {}, ensemble,
                                                           oracle::net_value(), Rational(4)))
            << "\n";
  return check.pass ? 0 : 1;
}
