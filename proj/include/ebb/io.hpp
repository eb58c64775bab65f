#pragma once

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "ebb/evidence.hpp"
#include "ebb/game.hpp"
#include "ebb/leverage.hpp"
#include "ebb/oracle.hpp"
#include "ebb/rational.hpp"
#include "ebb/simulate.hpp"

namespace ebb::io {

inline constexpr const char* kVersion = "0.1.0";

// Every file a command writes starts with this: the tool version, the
// resolved invocation, and the seed in force.
struct RunHeader {
  std::string command;
  uint64_t seed = 0;
  bool seeded = false;
};

inline void write_comment_header(std::ostream& os, const RunHeader& header) {
  os << "# version=" << kVersion << "\n";
  if (!header.command.empty()) os << "# config=" << header.command << "\n";
  if (header.seeded) os << "# seed=" << header.seed << "\n";
}

template <class V>
std::string format_value(const V& v) {
  if constexpr (std::is_same_v<V, Rational>) {
    return format_rational(v);
  } else {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  }
}

template <class V>
double decimal_value(const V& v) {
  if constexpr (std::is_same_v<V, Rational>) {
    return to_double(v);
  } else {
    return v;
  }
}

// One row per time index. Exact columns render as p/q with decimal twins
// appended for plotting; per-round inputs are blank on the t = 0 row and
// optional series are blank when not tracked.
template <class V>
void write_ledger_csv(std::ostream& os, const Ledger<V>& ledger,
                      const RunHeader* header = nullptr) {
  if (header) write_comment_header(os, *header);
  const bool sub = ledger.has_sub_liabilities();
  const bool comp = ledger.has_compound();

  std::vector<std::string> value_cols = {"W", "L", "N", "subL", "subN", "compL", "adjW", "adjN"};
  os << "t,X,beta,lambda,b";
  for (const std::string& c : value_cols) os << "," << c;
  for (const std::string& c : value_cols) os << "," << c << "_dec";
  os << "\n";

  std::ostringstream exact, dec;
  dec << std::setprecision(17);
  for (size_t t = 0; t <= ledger.rounds(); ++t) {
    exact.str("");
    dec.str("");
    auto put = [&](bool present, const std::vector<V>& series) {
      if (present) {
        exact << "," << format_value(series[t]);
        dec << "," << decimal_value(series[t]);
      } else {
        exact << ",";
        dec << ",";
      }
    };
    put(true, ledger.gross());
    put(true, ledger.liabilities());
    put(true, ledger.net());
    put(sub, sub ? ledger.sub_liabilities() : ledger.gross());
    put(sub, sub ? ledger.sub_net() : ledger.gross());
    put(comp, comp ? ledger.compound_liabilities() : ledger.gross());
    put(comp, comp ? ledger.adj_gross() : ledger.gross());
    put(comp, comp ? ledger.adj_net() : ledger.gross());

    os << t;
    if (t == 0) {
      os << ",,,,";
    } else {
      os << "," << ledger.outcomes()[t - 1].value()
         << "," << format_value(ledger.decisions()[t - 1].borrow)
         << "," << format_value(ledger.decisions()[t - 1].fraction)
         << "," << format_value(ledger.bonuses()[t - 1]);
    }
    os << exact.str() << dec.str() << "\n";
  }
}

// One JSON object per time index, mirroring the CSV columns.
template <class V>
void write_ledger_jsonl(std::ostream& os, const Ledger<V>& ledger,
                        const RunHeader* header = nullptr) {
  if (header) {
    nlohmann::json h{{"version", kVersion}, {"config", header->command}};
    if (header->seeded) h["seed"] = header->seed;
    os << h.dump() << "\n";
  }
  for (size_t t = 0; t <= ledger.rounds(); ++t) {
    nlohmann::json j;
    j["t"] = t;
    if (t > 0) {
      j["X"] = ledger.outcomes()[t - 1].value();
      j["beta"] = format_value(ledger.decisions()[t - 1].borrow);
      j["lambda"] = format_value(ledger.decisions()[t - 1].fraction);
      j["b"] = format_value(ledger.bonuses()[t - 1]);
    }
    j["W"] = format_value(ledger.gross()[t]);
    j["L"] = format_value(ledger.liabilities()[t]);
    j["N"] = format_value(ledger.net()[t]);
    if (ledger.has_sub_liabilities()) {
      j["subL"] = format_value(ledger.sub_liabilities()[t]);
      j["subN"] = format_value(ledger.sub_net()[t]);
    }
    if (ledger.has_compound()) {
      j["compL"] = format_value(ledger.compound_liabilities()[t]);
      j["adjW"] = format_value(ledger.adj_gross()[t]);
      j["adjN"] = format_value(ledger.adj_net()[t]);
    }
    os << j.dump() << "\n";
  }
}

inline nlohmann::json assumption_json(const AssumptionReport& report) {
  nlohmann::json j;
  j["nonnegative_borrowings"] = report.nonnegative_borrowings;
  auto put = [&j](const char* key, const std::optional<Rational>& v) {
    if (v) j[key] = format_rational(*v);
  };
  if (report.optional_stopping) j["optional_stopping"] = *report.optional_stopping;
  put("expected_stopped_liabilities", report.expected_stopped_liabilities);
  put("expected_liabilities_sup", report.expected_liabilities_sup);
  put("net_floor", report.net_floor);
  put("sub_net_floor", report.sub_net_floor);
  put("adjusted_net_floor", report.adjusted_net_floor);
  put("positive_borrow_bound", report.positive_borrow_bound);
  put("bonus_total", report.bonus_total);
  return j;
}

inline nlohmann::json certificate_json(const EvidenceCertificate& cert,
                                       const AssumptionReport* report = nullptr) {
  nlohmann::json j;
  j["kind"] = to_string(cert.kind);
  j["subject"] = to_string(cert.subject);
  j["a"] = format_rational(cert.a);
  j["b"] = format_rational(cert.b);
  j["c"] = format_rational(cert.c);
  if (!cert.stopping_rule.empty()) j["stopping_rule"] = cert.stopping_rule;
  if (report) j["assumptions"] = assumption_json(*report);
  return j;
}

inline nlohmann::json check_json(const oracle::CheckResult& result) {
  nlohmann::json j;
  j["check"] = result.name;
  j["verdict"] = result.pass ? "pass" : "fail";
  if (!result.pass) {
    nlohmann::json witness;
    if (result.witness_level) witness["x"] = format_rational(*result.witness_level);
    witness["masks"] = result.witness_masks;
    witness["paths"] = result.witness_paths;
    j["witness"] = witness;
    j["detail"] = result.detail;
  }
  return j;
}

// CSV rows (x, empirical_tail, bound, stderr); bound column is the caller's
// certificate bound per level, NaN-free only when supplied.
inline void write_sim_csv(std::ostream& os, const sim::SimReport& report,
                          const std::vector<double>& bounds, const RunHeader* header = nullptr) {
  if (header) write_comment_header(os, *header);
  os << "x,empirical_tail,bound,stderr\n";
  os << std::setprecision(17);
  for (size_t g = 0; g < report.grid.size(); ++g) {
    os << report.grid[g] << "," << report.tail[g] << ",";
    if (g < bounds.size()) os << bounds[g];
    os << "," << report.stderrs[g] << "\n";
  }
}

inline nlohmann::json sim_summary_json(const sim::SimReport& report) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["horizon"] = report.horizon;
  j["replications"] = report.replications;
  j["seed"] = report.seed;
  j["strategy"] = report.strategy;
  j["bias"] = report.bias;
  j["track"] = report.track;
  j["grid"] = report.grid;
  j["tail"] = report.tail;
  j["stderr"] = report.stderrs;
  j["standardized_mean"] = report.standardized_mean;
  return j;
}

// Bets come in as CSV rows value,p_weight,q_weight (an optional header row is
// skipped); '#' lines are comments.
inline DiscreteBet read_bet_csv(std::istream& is) {
  std::vector<Rational> values, p, q;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string v, pw, qw;
    if (!std::getline(row, v, ',') || !std::getline(row, pw, ',') || !std::getline(row, qw))
      throw std::invalid_argument("read_bet_csv: expected value,p_weight,q_weight");
    try {
      values.push_back(parse_rational(v));
    } catch (const std::invalid_argument&) {
      if (values.empty()) continue;  // header row
      throw;
    }
    p.push_back(parse_rational(pw));
    q.push_back(parse_rational(qw));
  }
  return DiscreteBet::make(std::move(values), std::move(p), std::move(q));
}

inline nlohmann::json leverage_json(const DiscreteBet& bet, const EvidenceFunctionalResult& r) {
  nlohmann::json j;
  nlohmann::json support = nlohmann::json::array();
  for (size_t i = 0; i < bet.size(); ++i)
    support.push_back({{"value", format_rational(bet.values[i])},
                       {"p", format_rational(bet.p_weights[i])},
                       {"q", format_rational(bet.q_weights[i])}});
  j["support"] = support;
  j["bounded"] = r.bounded;
  if (!r.bounded) {
    j["unbounded_reason"] = r.unbounded_reason;
    return j;
  }
  j["value"] = format_rational(r.value);
  j["value_dec"] = to_double(r.value);
  j["argmax"] = {{"a", format_rational(r.scale)}, {"b", format_rational(r.shift)}};
  j["branch"] = r.negative_scale_branch ? "negative" : "nonnegative";
  if (r.restricted_differs) {
    j["restricted_value"] = format_rational(r.restricted_value);
    j["restricted_argmax"] = {{"a", format_rational(r.restricted_scale)},
                              {"b", format_rational(r.restricted_shift)}};
  }
  return j;
}

}  // namespace ebb::io
