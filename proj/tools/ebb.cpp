// Command-line front end: play ledgers, enumerate ensembles, verify the
// proposition suites, run Monte Carlo, evaluate bets.
//
// Exit codes: 0 ok, 1 usage error, 2 check failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebb/evidence.hpp"
#include "ebb/game.hpp"
#include "ebb/io.hpp"
#include "ebb/leverage.hpp"
#include "ebb/oracle.hpp"
#include "ebb/rational.hpp"
#include "ebb/simulate.hpp"
#include "ebb/strategies.hpp"
#include "ebb/verify.hpp"

namespace {

using namespace ebb;

struct GlobalOptions {
  uint64_t seed = 20240801;
  size_t workers = 1;
  std::string out_dir = ".";
  std::string format = "csv";
};

std::string joined_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

std::ofstream open_out(const GlobalOptions& global, const std::string& name) {
  std::filesystem::create_directories(global.out_dir);
  const auto path = std::filesystem::path(global.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  return os;
}

// run: play one strategy along an explicit path and emit the ledger.
int cmd_run(const GlobalOptions& global, const std::string& header, const std::string& spec,
            const std::string& path_text, size_t horizon, bool horizon_given,
            const std::string& bonus, const std::string& eta_spec, bool compound,
            const std::string& out) {
  ParsedStrategy<Rational> parsed = parse_strategy<Rational>(spec);
  PayoffSchedule schedule = parsed.schedule.value_or(PayoffSchedule{});
  if (!bonus.empty()) schedule = PayoffSchedule::flat(parse_rational(bonus));

  const Path path = parse_path(path_text);
  if (horizon_given && path.size() != horizon)
    throw std::invalid_argument("run: path has " + std::to_string(path.size()) +
                                " outcomes but --horizon says " + std::to_string(horizon));

  Ledger<Rational> ledger = run_game(parsed.strategy, path, schedule);
  if (compound) ledger = attach_compound_liabilities(ledger);
  if (!eta_spec.empty())
    ledger = attach_sub_liabilities(ledger, parse_eta<Rational>(eta_spec));

  io::RunHeader run_header{header, global.seed, true};
  auto write = [&](std::ostream& os) {
    if (global.format == "jsonl")
      io::write_ledger_jsonl(os, ledger, &run_header);
    else
      io::write_ledger_csv(os, ledger, &run_header);
  };
  if (out.empty()) {
    write(std::cout);
  } else {
    auto os = open_out(global, out);
    write(os);
    std::cout << "ledger written to " << (std::filesystem::path(global.out_dir) / out).string()
              << "\n";
  }
  return 0;
}

// enumerate: exact per-path terminal values and ensemble expectations.
int cmd_enumerate(const GlobalOptions& global, const std::string& header,
                  const std::string& spec, size_t horizon, const std::string& bias_text,
                  const std::string& bonus, const std::string& eta_spec, bool compound,
                  const std::string& out) {
  ParsedStrategy<Rational> parsed = parse_strategy<Rational>(spec);
  PayoffSchedule schedule = parsed.schedule.value_or(PayoffSchedule{});
  if (!bonus.empty()) schedule = PayoffSchedule::flat(parse_rational(bonus));
  const oracle::PathEnsemble ensemble(horizon, parse_rational(bias_text));

  std::optional<EtaWeights<Rational>> eta;
  oracle::WalkOptions opt;
  opt.compound = compound;
  if (!eta_spec.empty()) {
    eta = parse_eta<Rational>(eta_spec);
    opt.eta = &*eta;
  }

  std::ostringstream body;
  Rational mean_gross(0), mean_net(0);
  std::vector<Rational> running;
  oracle::walk(
      parsed.strategy, schedule, ensemble,
      [&](const Ledger<Rational>& led, const Rational& w) {
        const size_t t = led.rounds();
        running.resize(t + 1);
        running[t] = t == 0 ? led.gross().back() : std::max(running[t - 1], led.gross().back());
        if (t < ensemble.horizon) return true;
        body << format_path(led.outcomes()) << "," << format_rational(w) << ","
             << format_rational(led.gross().back()) << ","
             << format_rational(led.liabilities().back()) << ","
             << format_rational(led.net().back()) << "," << format_rational(running[t]);
        if (opt.eta) body << "," << format_rational(led.sub_net().back());
        if (compound) body << "," << format_rational(led.adj_net().back());
        body << "\n";
        mean_gross += w * led.gross().back();
        mean_net += w * led.net().back();
        return true;
      },
      opt);

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file = open_out(global, out);
    os = &file;
  }
  io::RunHeader run_header{header, global.seed, true};
  io::write_comment_header(*os, run_header);
  *os << "# E[W_T]=" << format_rational(mean_gross) << " E[N_T]=" << format_rational(mean_net)
      << "\n";
  *os << "path,weight,W,L,N,supW";
  if (opt.eta) *os << ",subN";
  if (compound) *os << ",adjN";
  *os << "\n" << body.str();
  return 0;
}

// table1: the reference two-round example, computed against its published
// values, with the known sub-net discrepancy flagged.
int cmd_table1() {
  const auto rows = verify::two_round_reference();
  std::cout << "two-round game, borrow 1 and bet 1/2 each round; sub-liability weight 2-X1 on "
               "the second borrow\n";
  std::cout << "columns: computed (reference where it differs)\n\n";
  std::cout << std::left << std::setw(6) << "X1" << std::setw(6) << "X2" << std::setw(8) << "W2"
            << std::setw(8) << "N2" << std::setw(12) << "(N2+1)/2" << std::setw(12) << "subN2"
            << std::setw(12) << "(subN2+3)/4"
            << "\n";
  bool flagged = false;
  for (const auto& row : rows) {
    auto cell = [](const Rational& computed, const Rational& reference) {
      std::string s = format_rational(computed);
      if (computed != reference) s += " (" + format_rational(reference) + ")";
      return s;
    };
    std::cout << std::left << std::setw(6) << row.first << std::setw(6) << row.second
              << std::setw(8) << cell(row.gross, row.ref_gross) << std::setw(8)
              << cell(row.net, row.ref_net) << std::setw(12) << cell(row.net_e, row.ref_net_e)
              << std::setw(12) << cell(row.sub_net, row.ref_sub_net) << std::setw(12)
              << cell(row.sub_net_e, row.ref_sub_net_e) << "\n";
    flagged = flagged || !row.sub_columns_match;
  }
  std::cout << "\n";
  if (flagged) {
    std::cout << "note: on row (-1,+1) the reference lists sub-net 1 with e-value 1, but the\n"
                 "second borrow's weight is fixed by the first toss (eta_2 = 2 - X1 = 3), so\n"
                 "the sub-liabilities on both X1=-1 rows are 4: computed sub-net -1, e-value "
                 "1/2.\n";
  }
  return 0;
}

// verify: run the proposition suites; nonzero exit on any failed check.
int cmd_verify(const GlobalOptions& global, const std::string& suite, size_t strategies,
               size_t rules, size_t instances, size_t horizon, const std::string& strategy_spec,
               const std::string& jsonl_out) {
  std::vector<verify::SuiteResult> results;
  const bool all = suite == "all";

  std::optional<std::vector<verify::CorpusEntry>> corpus;
  if (!strategy_spec.empty()) {
    corpus = std::vector<verify::CorpusEntry>{
        {parse_strategy<Rational>(strategy_spec).strategy, horizon, false}};
  }
  auto default_corpus = [&] {
    return corpus ? *corpus : verify::strategy_corpus(strategies, horizon, global.seed);
  };

  if (all || suite == "table") results.push_back(verify::suite_table());
  if (all || suite == "doob")
    results.push_back(verify::suite_doob(default_corpus(), !corpus.has_value()));
  if (all || suite == "certificates")
    results.push_back(verify::suite_certificates(default_corpus()));
  if (all || suite == "stopping")
    results.push_back(verify::suite_stopping(default_corpus(), rules, global.seed));
  if (all || suite == "guard")
    results.push_back(verify::suite_guard(std::min<size_t>(strategies, 20), horizon, global.seed));
  if (all || suite == "betsave") results.push_back(verify::suite_betsave(global.seed));
  if (all || suite == "leverage")
    results.push_back(verify::suite_leverage(instances, 20, global.seed));
  if (all || suite == "mispricing")
    results.push_back(verify::suite_mispricing(std::min<size_t>(horizon, 8), global.seed));
  if (results.empty()) {
    std::cerr << "unknown suite '" << suite
              << "' (table, doob, certificates, stopping, guard, betsave, leverage, mispricing, "
                 "all)\n";
    return 1;
  }

  bool pass = true;
  std::ostringstream jsonl;
  for (const auto& result : results) {
    pass = pass && result.pass;
    std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << "\n";
    for (const auto& line : result.lines) std::cout << "       " << line << "\n";
    nlohmann::json j{{"check", result.name},
                     {"verdict", result.pass ? "pass" : "fail"},
                     {"seed", global.seed},
                     {"lines", result.lines}};
    jsonl << j.dump() << "\n";
  }
  if (!jsonl_out.empty()) {
    auto os = open_out(global, jsonl_out);
    os << jsonl.str();
  }
  return pass ? 0 : 2;
}

// mc: seeded Monte Carlo report with optional certificate bound column.
int cmd_mc(const GlobalOptions& global, const std::string& header, sim::SimConfig config,
           const std::string& grid_text, const std::string& track, const std::string& std_a,
           const std::string& std_b, const std::string& bound_spec,
           const std::string& out_prefix) {
  config.seed = global.seed;
  config.workers = global.workers;
  config.track = track == "net" ? sim::Track::Net : sim::Track::Gross;
  config.standardize_scale = parse_rational(std_a);
  config.standardize_shift = parse_rational(std_b);
  if (!grid_text.empty()) {
    std::istringstream gs(grid_text);
    std::string item;
    while (std::getline(gs, item, ',')) config.grid.push_back(to_double(parse_rational(item)));
  }

  const sim::SimReport report = sim::run_mc(config);
  io::RunHeader run_header{header, global.seed, true};

  // certificate constants "a,b,c" fill the bound column of the tail curve
  std::vector<double> bounds;
  if (!bound_spec.empty()) {
    std::istringstream bs(bound_spec);
    std::string a, b, c;
    if (!std::getline(bs, a, ',') || !std::getline(bs, b, ',') || !std::getline(bs, c))
      throw std::invalid_argument("mc: --bound expects a,b,c");
    EvidenceCertificate cert{parse_rational(a), parse_rational(b), parse_rational(c),
                             EvidenceKind::Sequential, WealthSubject::Gross, ""};
    for (double x : report.grid) {
      const Rational level(static_cast<long long>(x * 4096), 4096LL);
      bounds.push_back(level > cert.b ? to_double(tail_bound(cert, level)) : 1.0);
    }
  }

  auto csv = open_out(global, out_prefix + ".csv");
  io::write_sim_csv(csv, report, bounds, &run_header);
  auto json = open_out(global, out_prefix + ".json");
  json << io::sim_summary_json(report).dump(2) << "\n";

  std::cout << "strategy " << report.strategy << ", T=" << report.horizon
            << ", R=" << report.replications << ", seed=" << report.seed << "\n";
  std::cout << std::setprecision(6) << "standardized terminal mean: " << report.standardized_mean
            << "\n";
  for (size_t g = 0; g < report.grid.size(); ++g)
    std::cout << "  Pr(sup >= " << report.grid[g] << ") ~ " << report.tail[g] << " (se "
              << report.stderrs[g] << ")\n";
  std::cout << "report written to " << out_prefix << ".csv / .json\n";
  return 0;
}

// leverage: evaluate the standardized-evidence value of a bet.
int cmd_leverage(const GlobalOptions& global, const std::string& input,
                 const std::string& values, const std::string& p_text, const std::string& q_text,
                 const std::string& borrow_text, bool grid_audit, const std::string& out) {
  DiscreteBet bet = [&] {
    if (!input.empty()) {
      std::ifstream is(input);
      if (!is) throw std::runtime_error("cannot open " + input);
      return io::read_bet_csv(is);
    }
    auto parse_list = [](const std::string& text) {
      std::vector<Rational> xs;
      std::istringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) xs.push_back(parse_rational(item));
      return xs;
    };
    return DiscreteBet::make(parse_list(values), parse_list(p_text), parse_list(q_text));
  }();

  std::ostringstream body;
  const auto base = evidence_functional(bet);
  nlohmann::json record = io::leverage_json(bet, base);
  if (grid_audit && base.bounded) record["grid_value"] = grid_search_evidence(bet);
  body << record.dump() << "\n";

  if (!borrow_text.empty()) {
    const Rational borrow = parse_rational(borrow_text);
    const DiscreteBet mapped = leverage_map(bet, borrow);
    const auto result = evidence_functional(mapped);
    nlohmann::json mapped_record = io::leverage_json(mapped, result);
    mapped_record["borrow"] = format_rational(borrow);
    mapped_record["invariant"] =
        base.bounded && result.bounded && base.value == result.value;
    body << mapped_record.dump() << "\n";
  }

  if (out.empty()) {
    std::cout << body.str();
  } else {
    auto os = open_out(global, out);
    os << body.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOptions global;
  CLI::App app{"betting-game ledgers, exact evidence certificates and their verification"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config");
  app.add_option("--seed", global.seed, "master seed for anything sampled");
  app.add_option("--workers", global.workers, "worker threads for Monte Carlo");
  app.add_option("--out-dir", global.out_dir, "directory for output files");
  app.add_option("--format", global.format, "csv or jsonl (file outputs)");

  std::string strategy = "idle", path_text, bonus, eta_spec, out, bias = "1/2";
  bool compound = false;
  size_t horizon = 6;
  auto* run = app.add_subcommand("run", "play a strategy along an explicit path");
  run->add_option("--strategy", strategy, "strategy spec, e.g. constant:lambda=1/2,beta=1")
      ->required();
  run->add_option("--path", path_text, "comma-separated +1/-1 outcomes")->required();
  run->add_option("--horizon", horizon, "optional cross-check against the path length");
  run->add_option("--bonus", bonus, "flat per-round bonus b (rational)");
  run->add_option("--eta", eta_spec, "sub-liability weights: unit | losspenalty");
  run->add_flag("--compound", compound, "attach interest-bearing liabilities");
  run->add_option("--out", out, "output file (default stdout)");

  auto* enumerate = app.add_subcommand("enumerate", "exact per-path table over all outcomes");
  enumerate->add_option("--strategy", strategy)->required();
  enumerate->add_option("--horizon", horizon, "number of rounds (<= 20)");
  enumerate->add_option("--bias", bias, "P(heads) as a rational");
  enumerate->add_option("--bonus", bonus);
  enumerate->add_option("--eta", eta_spec);
  enumerate->add_flag("--compound", compound);
  enumerate->add_option("--out", out);

  auto* table1 = app.add_subcommand("table1", "reference two-round example with discrepancy note");

  std::string suite = "all", jsonl_out;
  size_t strategies = 100, rules = 64, instances = 200, verify_horizon = 10;
  auto* verify_cmd = app.add_subcommand("verify", "run exact proposition checks");
  verify_cmd->add_option("--suite", suite,
                         "table|doob|certificates|stopping|guard|betsave|leverage|mispricing|all");
  verify_cmd->add_option("--strategies", strategies, "corpus size");
  verify_cmd->add_option("--rules", rules, "sampled stopping rules per strategy");
  verify_cmd->add_option("--instances", instances, "leverage instances");
  verify_cmd->add_option("--horizon", verify_horizon, "max corpus horizon");
  verify_cmd->add_option("--strategy", strategy, "check this strategy instead of the corpus");
  verify_cmd->add_option("--jsonl", jsonl_out, "also write verdicts as JSON lines");

  sim::SimConfig mc_config;
  std::string grid = "2,4,8", track = "gross", std_a = "1", std_b = "0", out_prefix = "mc";
  auto* mc = app.add_subcommand("mc", "seeded Monte Carlo tail estimates");
  mc->add_option("--strategy", mc_config.strategy_spec)->required();
  mc->add_option("--horizon", mc_config.horizon);
  mc->add_option("--replications", mc_config.replications);
  mc->add_option("--bias", bias, "P(heads) as a rational");
  mc->add_option("--bonus", mc_config.bonus, "flat per-round bonus");
  mc->add_option("--grid", grid, "comma-separated levels for the tail curve");
  mc->add_option("--track", track, "gross or net");
  mc->add_option("--std-a", std_a, "standardization scale for terminal values");
  mc->add_option("--std-b", std_b, "standardization shift for terminal values");
  std::string bound_spec;
  mc->add_option("--bound", bound_spec, "certificate constants a,b,c for the bound column");
  mc->add_option("--out-prefix", out_prefix, "basename for .csv/.json reports");

  std::string bet_input, bet_values, bet_p, bet_q, borrow_text;
  bool grid_audit = false;
  auto* leverage = app.add_subcommand("leverage", "standardized-evidence value of a bet");
  leverage->add_option("--input", bet_input, "CSV of value,p_weight,q_weight rows");
  leverage->add_option("--values", bet_values, "inline support values (comma-separated)");
  leverage->add_option("--p", bet_p, "inline null weights");
  leverage->add_option("--q", bet_q, "inline alternative weights");
  leverage->add_option("--borrow", borrow_text, "also evaluate the leveraged bet");
  leverage->add_flag("--grid-audit", grid_audit, "include the grid-search audit value");
  leverage->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string header = joined_args(argc, argv);
  try {
    if (run->parsed())
      return cmd_run(global, header, strategy, path_text, horizon, run->count("--horizon") > 0,
                     bonus, eta_spec, compound, out);
    if (enumerate->parsed())
      return cmd_enumerate(global, header, strategy, horizon, bias, bonus, eta_spec, compound,
                           out);
    if (table1->parsed()) return cmd_table1();
    if (verify_cmd->parsed())
      return cmd_verify(global, suite, strategies, rules, instances, verify_horizon,
                        verify_cmd->count("--strategy") ? strategy : "", jsonl_out);
    if (mc->parsed()) {
      mc_config.bias = parse_rational(bias);
      return cmd_mc(global, header, mc_config, grid, track, std_a, std_b, bound_spec,
                    out_prefix);
    }
    if (leverage->parsed())
      return cmd_leverage(global, bet_input, bet_values, bet_p, bet_q, borrow_text, grid_audit,
                          out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
