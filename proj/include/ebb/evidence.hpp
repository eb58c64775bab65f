#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include "ebb/game.hpp"
#include "ebb/rational.hpp"

namespace ebb {

// What a tail certificate is about.
enum class WealthSubject { Gross, Net, SubNet, AdjustedNet };

enum class EvidenceKind { Stopped, Sequential };

inline const char* to_string(WealthSubject s) {
  switch (s) {
    case WealthSubject::Gross: return "gross";
    case WealthSubject::Net: return "net";
    case WealthSubject::SubNet: return "sub_net";
    case WealthSubject::AdjustedNet: return "adjusted_net";
  }
  return "?";
}

inline const char* to_string(EvidenceKind k) {
  return k == EvidenceKind::Stopped ? "stopped" : "sequential";
}

// Exact record of which assumptions a certificate leans on, with the exact
// constants attesting them. Fields are set either by the enumeration engine
// (which computes them over every path) or by a construction that guarantees
// them (e.g. the floor-guard strategy). Certificate constructors refuse to
// run without a matching attestation: a ledger alone cannot prove them.
struct AssumptionReport {
  bool nonnegative_borrowings = false;            // every borrow >= 0 on reachable prefixes
  std::optional<std::string> optional_stopping;   // why stopping at tau is safe
  std::optional<Rational> expected_stopped_liabilities;  // E[L_tau]
  std::optional<Rational> expected_liabilities_sup;      // sup_t E[L_t]
  std::optional<Rational> net_floor;                     // pathwise floor on net wealth
  std::optional<Rational> sub_net_floor;                 // pathwise floor on sub-net wealth
  std::optional<Rational> adjusted_net_floor;            // pathwise floor on adjusted net
  std::optional<Rational> positive_borrow_bound;         // sup_t E[sum (1+b_i) borrow_i^+]
  std::optional<Rational> bonus_total;                   // sum of schedule bonuses
};

// Encodes the bound Pr(E >= x) <= a/(x-b) + c, either for one stopped value
// (kind Stopped, at the named rule) or uniformly over time (Sequential).
struct EvidenceCertificate {
  Rational a;  // > 0
  Rational b;  // 0 for gross-wealth certificates, the floor (< 1) otherwise
  Rational c;  // >= 0; nonzero only when the odds carry a risk-free bonus
  EvidenceKind kind = EvidenceKind::Sequential;
  WealthSubject subject = WealthSubject::Gross;
  std::string stopping_rule;  // set iff kind == Stopped
};

// a/(x-b) + c for x > b, clamped into [0, 1].
inline Rational tail_bound(const EvidenceCertificate& cert, const Rational& x) {
  if (x <= cert.b)
    throw std::domain_error("tail_bound: level must exceed the certificate offset");
  Rational bound = cert.a / (x - cert.b) + cert.c;
  return bound > 1 ? Rational(1) : bound;
}

// Standardizes evidence E into an e-value (E - b) / a.
inline Rational to_e_value(const Rational& evidence, const Rational& a, const Rational& b) {
  if (a <= 0) throw std::invalid_argument("to_e_value: a must be positive");
  return (evidence - b) / a;
}

// p-value companion: min(1, a / (E - b)), and 1 when the evidence does not
// clear the offset.
inline Rational to_p_value(const Rational& evidence, const Rational& a, const Rational& b) {
  if (a <= 0) throw std::invalid_argument("to_p_value: a must be positive");
  if (evidence <= b) return Rational(1);
  Rational p = a / (evidence - b);
  return p > 1 ? Rational(1) : p;
}

// Stopped gross-wealth certificate (1 + L, 0, 0): gross wealth at the rule,
// discounted by the expected stopped liabilities. Requires an attestation of
// safe stopping and an attested expected value at or below the constant L
// requested (any upper bound keeps the mean inequality, a slacker one just
// weakens the certificate).
inline EvidenceCertificate certify_gross_stopped(const Rational& expected_stopped_liabilities,
                                                 std::string stopping_rule,
                                                 const AssumptionReport& report) {
  if (expected_stopped_liabilities < 0)
    throw std::invalid_argument("certify_gross_stopped: negative expected liabilities");
  if (!report.optional_stopping)
    throw std::invalid_argument("certify_gross_stopped: stopping safety not attested");
  if (!report.expected_stopped_liabilities ||
      *report.expected_stopped_liabilities > expected_stopped_liabilities)
    throw std::invalid_argument("certify_gross_stopped: attestation does not support L");
  return EvidenceCertificate{Rational(1) + expected_stopped_liabilities, Rational(0), Rational(0),
                             EvidenceKind::Stopped, WealthSubject::Gross,
                             std::move(stopping_rule)};
}

// Sequential gross-wealth certificate (1 + B, 0, C). B bounds the expected
// bonus-weighted positive borrowings; C is the total bonus (0 in the fair
// game). Accepts either the positive-part attestation or, for the fair game,
// nonnegative borrowings plus a sup bound on expected liabilities.
inline EvidenceCertificate certify_gross_sequential(const Rational& borrow_bound,
                                                    const Rational& bonus_total,
                                                    const AssumptionReport& report) {
  if (borrow_bound < 0 || bonus_total < 0)
    throw std::invalid_argument("certify_gross_sequential: negative inputs");
  const bool positive_part_ok =
      report.positive_borrow_bound && *report.positive_borrow_bound <= borrow_bound;
  const bool liabilities_ok = report.nonnegative_borrowings &&
                              report.expected_liabilities_sup &&
                              *report.expected_liabilities_sup <= borrow_bound &&
                              bonus_total == 0;
  if (!positive_part_ok && !liabilities_ok)
    throw std::invalid_argument("certify_gross_sequential: attestation does not support B");
  if (bonus_total != 0 && (!report.bonus_total || *report.bonus_total > bonus_total))
    throw std::invalid_argument("certify_gross_sequential: attestation does not support C");
  return EvidenceCertificate{Rational(1) + borrow_bound, Rational(0), bonus_total,
                             EvidenceKind::Sequential, WealthSubject::Gross, ""};
}

// Net-style certificate (1 - floor, floor, 0) for net, sub-net or adjusted
// net wealth with a pathwise floor < 1. Valid in both kinds; pass the kind
// needed (and the rule id for the stopped kind).
inline EvidenceCertificate certify_net(const Rational& floor, WealthSubject subject,
                                       EvidenceKind kind, const AssumptionReport& report,
                                       std::string stopping_rule = "") {
  if (floor >= 1) throw std::invalid_argument("certify_net: floor must be < 1");
  const std::optional<Rational>* attested = nullptr;
  switch (subject) {
    case WealthSubject::Net: attested = &report.net_floor; break;
    case WealthSubject::SubNet: attested = &report.sub_net_floor; break;
    case WealthSubject::AdjustedNet: attested = &report.adjusted_net_floor; break;
    case WealthSubject::Gross:
      throw std::invalid_argument("certify_net: gross wealth has no floor certificate");
  }
  // any attested floor at or above the requested one supports the bound
  if (!attested->has_value() || **attested < floor)
    throw std::invalid_argument("certify_net: floor not attested");
  if (kind == EvidenceKind::Stopped && stopping_rule.empty())
    throw std::invalid_argument("certify_net: stopped kind needs a rule id");
  return EvidenceCertificate{Rational(1) - floor, floor, Rational(0), kind, subject,
                             std::move(stopping_rule)};
}

// Per-round feasibility test behind the floor-guard: would the worst coin
// toss keep net wealth at or above the floor? The worst case loses the whole
// staked fraction whichever side it is on.
template <class V>
bool net_floor_constraint(const V& gross_prev, const V& liabilities_prev, const V& borrow,
                          const V& fraction, const V& floor) {
  if (value_abs(fraction) > V(1) || borrow < -gross_prev)
    throw std::invalid_argument("net_floor_constraint: inadmissible decision");
  const V worst_factor = V(1) - value_abs(fraction);
  return (gross_prev + borrow) * worst_factor - borrow - liabilities_prev >= floor;
}

}  // namespace ebb
