// Command line front end: reproduce claims, run the whole batch, bracket a
// value, or simulate a strategy pair.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "cg/catalog.hpp"
#include "cg/harness.hpp"
#include "cg/solver.hpp"

namespace cat = cg::catalog;
using namespace cg;

namespace {

std::vector<std::string> split_args(const std::string& spec, std::string& head) {
  auto colon = spec.find(':');
  head = spec.substr(0, colon);
  std::vector<std::string> out;
  if (colon == std::string::npos) return out;
  std::stringstream ss(spec.substr(colon + 1));
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(part);
  return out;
}

cat::GamePtr game_by_name(const std::string& spec) {
  std::string name;
  auto args = split_args(spec, name);
  if (name == "big_match_N") return cat::big_match_N();
  if (name == "big_match_Z") return cat::big_match_Z(args.empty() ? 40 : std::stoll(args[0]));
  if (name == "tb_big_match_N") return cat::tb_big_match_N();
  if (name == "inf_branch_no_mr") return cat::inf_branch_no_mr();
  if (name == "inf_branch_no_markov") return cat::inf_branch_no_markov();
  if (name == "nested") return cat::nested(args.empty() ? 2 : std::stoi(args[0]));
  if (name == "combined") return cat::combined();
  if (name == "conc_optmax") return cat::conc_optmax();
  if (name == "infbranch_optmin") return cat::infbranch_optmin();
  throw std::invalid_argument("unknown game " + spec +
                              " (big_match_N, big_match_Z:k, tb_big_match_N, inf_branch_no_mr, inf_branch_no_markov, "
                              "nested:k, combined, conc_optmax, infbranch_optmin)");
}

Strategy strategy_by_name(const std::string& spec, const cat::GamePtr& game) {
  std::string name;
  auto args = split_args(spec, name);
  auto arg = [&](size_t k, const char* dflt) { return k < args.size() ? args[k] : std::string(dflt); };
  if (name == "max-bm") return cat::max_bm_strategy(std::stoll(arg(0, "1")), std::stoll(arg(1, "3")));
  if (name == "max-bm-tb") return cat::max_bm_strategy(std::stoll(arg(0, "1")), std::stoll(arg(1, "3")), cat::Form::TurnBased);
  if (name == "mr-inv-square") return cat::mr_from_f(cat::inv_square_rate());
  if (name == "mr-const") return cat::mr_from_f(cat::constant_rate(std::stod(arg(0, "0.3"))));
  if (name == "min-fair-coin") return cat::min_fair_coin();
  if (name == "min-always") return cat::min_always(std::stoull(arg(0, "0")));
  if (name == "opt-max") return cat::opt_max_conc_optmax();
  if (name == "opt-min") return cat::opt_min_infbranch();
  if (name == "as-winning") return cat::max_as_winning(game);
  if (name == "markov-summable") return cat::markov_summable_example().strategy;
  if (name == "markov-divergent") return cat::markov_divergent_example().strategy;
  if (name == "min-vs-markov") {
    bool summable = arg(0, "summable") == "summable";
    auto ex = summable ? cat::markov_summable_example() : cat::markov_divergent_example();
    return cat::min_vs_markov(ex.oracle, summable ? cat::SumClass::Summable : cat::SumClass::Divergent,
                              std::stod(arg(1, "0.1")))
        .strategy;
  }
  if (name == "first-max" || name == "first-min")
    return Strategy::memoryless(name, name == "first-max" ? Player::Max : Player::Min,
                                [](const StateId&) { return Mix::dirac(0); }, true);
  throw std::invalid_argument("unknown strategy " + spec +
                              " (max-bm:x,N, max-bm-tb:x,N, mr-inv-square, mr-const:c, min-fair-coin, min-always:b, "
                              "opt-max, opt-min, as-winning, markov-summable, markov-divergent, "
                              "min-vs-markov:summable|divergent,eps, first-max, first-min)");
}

// Window of parameter and nest entries bounded by R in absolute value.
std::function<bool(const StateId&)> box_window(int64_t R) {
  return [R](const StateId& s) {
    for (auto v : s.params)
      if (std::abs(v) > R) return false;
    for (auto v : s.nest)
      if (std::abs(v) > R) return false;
    return true;
  };
}

void print_rows(const std::vector<harness::ResultRow>& rows) {
  size_t failed = 0;
  for (const auto& r : rows) failed += r.pass ? 0 : 1;
  std::cout << harness::to_csv(rows);
  std::cerr << rows.size() << " rows, " << failed << " failed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"countable-games: countably infinite stochastic reachability games"};
  app.require_subcommand(1);

  auto* rep = app.add_subcommand("reproduce", "run one claim's experiment");
  std::string claim, out_dir = "results";
  std::vector<std::string> sets;
  bool no_runtime = false;
  rep->add_option("claim", claim, "claim id")->required();
  rep->add_option("--set", sets, "parameter override key=value");
  rep->add_option("--out", out_dir, "output directory for the CSV");
  rep->add_flag("--no-runtime", no_runtime, "write runtime_ms = 0 for byte-stable output");

  auto* all = app.add_subcommand("run-all", "run every registered claim");
  std::string config_dir;
  all->add_option("--config", config_dir, "directory of *.conf files");
  all->add_option("--out", out_dir, "output directory");
  all->add_flag("--no-runtime", no_runtime, "write runtime_ms = 0 for byte-stable output");

  auto* val = app.add_subcommand("value", "bracket the value of a state");
  std::string game_name, state_text;
  int64_t radius = 20;
  double tol = 0.0;
  val->add_option("game", game_name)->required();
  val->add_option("state", state_text, "state in text form, e.g. c(3)")->required();
  val->add_option("--radius", radius, "truncation radius")->required();
  val->add_option("--tol", tol, "stop once the bracket is narrower");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate for a strategy pair");
  std::string sigma_name, pi_name, start_text;
  uint64_t horizon = 1000, episodes = 10000, seed = 1;
  sim->add_option("game", game_name)->required();
  sim->add_option("sigma", sigma_name, "Maximizer strategy")->required();
  sim->add_option("pi", pi_name, "Minimizer strategy")->required();
  sim->add_option("--horizon", horizon);
  sim->add_option("--episodes", episodes);
  sim->add_option("--seed", seed);
  sim->add_option("--start", start_text, "start state (default: the game's start)");

  auto* list = app.add_subcommand("claims", "print the claim registry as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    harness::RunOptions ro;
    ro.out_dir = out_dir;
    ro.record_runtime = !no_runtime;
    if (*rep) {
      harness::ParamMap ov;
      for (const auto& kv : sets) {
        auto [k, v] = harness::parse_override(kv);
        ov[k] = v;
      }
      auto rows = harness::reproduce(claim, ov, ro);
      print_rows(rows);
      for (const auto& r : rows)
        if (!r.pass) return 1;
      return 0;
    }
    if (*all) {
      auto sum = harness::run_all(config_dir, ro);
      std::cout << sum.markdown;
      return sum.pass() ? 0 : 1;
    }
    if (*val) {
      auto game = game_by_name(game_name);
      auto st = decode(state_text);
      if (!st) throw std::invalid_argument("cannot parse state " + state_text);
      Truncation t;
      if (game->name() == "big_match_N") {
        t.inside = cat::bm_window(0, radius);
      } else if (game->name().rfind("big_match_Z", 0) == 0) {
        t.inside = cat::bm_window(-1'000'000, radius);
      } else if (game->name() == "tb_big_match_N") {
        t.inside = cat::tb_window(radius, (radius + 1) * (radius + 1));
      } else {
        t.inside = box_window(radius);
      }
      t.policy = BoundaryPolicy::Certified;
      t.radius = radius;
      t.starts = {*st};
      auto res = value_bounds(*game, *st, {t}, tol);
      for (const auto& s : res.steps)
        std::printf("radius %lld states %zu bracket [%.9f, %.9f] %s\n", (long long)s.radius, s.states, s.bracket.lo,
                    s.bracket.hi, s.certificate.c_str());
      std::printf("%s %s [%.9f, %.9f]\n", game->name().c_str(), encode(*st).c_str(), res.interval.lo, res.interval.hi);
      return 0;
    }
    if (*sim) {
      auto game = game_by_name(game_name);
      auto sigma = strategy_by_name(sigma_name, game);
      auto pi = strategy_by_name(pi_name, game);
      StateId start;
      if (!start_text.empty()) {
        auto st = decode(start_text);
        if (!st) throw std::invalid_argument("cannot parse state " + start_text);
        start = *st;
      } else if (auto h = game->start_hint()) {
        start = *h;
      } else {
        throw std::invalid_argument("game has no default start; pass --start");
      }
      auto est = simulate_mc(*game, sigma, pi, start, horizon, episodes, seed);
      std::printf("estimate %.6f CI [%.6f, %.6f] episodes %llu seed %llu horizon %llu\n", est.absorbed, est.interval.lo,
                  est.interval.hi, (unsigned long long)est.episodes, (unsigned long long)est.seed,
                  (unsigned long long)est.horizon);
      return 0;
    }
    if (*list) {
      std::cout << cat::claims_table();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
