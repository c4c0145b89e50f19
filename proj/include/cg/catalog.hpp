#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cg/engine.hpp"
#include "cg/finite_game.hpp"
#include "cg/game.hpp"
#include "cg/numerics.hpp"
#include "cg/strategy.hpp"

namespace cg::catalog {

using GamePtr = std::shared_ptr<const Game>;

// ---- state ids ----

inline StateId c(int64_t i) { return StateId(Tag::C, {i}); }
inline StateId cij(int64_t i, int64_t j) { return StateId(Tag::Cij, {i, j}); }
inline StateId d(int64_t i, int64_t j) { return StateId(Tag::D, {i, j}); }
inline StateId r0(int64_t i, int64_t j) { return StateId(Tag::R0, {i, j}); }
inline StateId r1(int64_t i, int64_t j) { return StateId(Tag::R1, {i, j}); }
inline StateId u() { return StateId(Tag::U); }
inline StateId b(int64_t i) { return StateId(Tag::B, {i}); }
inline StateId bij(int64_t i, int64_t j) { return StateId(Tag::Bij, {i, j}); }
inline StateId bijl(int64_t i, int64_t j, int64_t l) { return StateId(Tag::Bijl, {i, j, l}); }
inline StateId lose() { return StateId(Tag::Lose); }
inline StateId win() { return StateId(Tag::Win); }
inline StateId s0() { return StateId(Tag::S0); }
inline StateId s_prime(int64_t i) { return StateId(Tag::SPrime, {i}); }
inline StateId s_dprime(int64_t i) { return StateId(Tag::SDoublePrime, {i}); }
inline StateId t_state() { return StateId(Tag::T); }
inline StateId f_state() { return StateId(Tag::F); }

// The same state inside a nested copy (nest path prefixed by `path`).
StateId in_copy(const StateId& s, const std::vector<int64_t>& path);

// ---- games ----

// Big Match on Z; reaching c_{-k_win} stands in for the liminf objective.
GamePtr big_match_Z(int64_t k_win);
GamePtr big_match_N();
GamePtr tb_big_match_N();
// Turn-based Big Match with branching degree two; p(i, m) in (0,1].
GamePtr tb_big_match_simple(std::function<double(int64_t, int)> p);
GamePtr inf_branch_no_mr();
GamePtr inf_branch_no_markov();
GamePtr nested(int k);
GamePtr combined();
GamePtr conc_optmax();
GamePtr infbranch_optmin();

// Window states of the Big Match games for truncation: c_i with lo <= i <= hi
// plus the absorbing states.
std::function<bool(const StateId&)> bm_window(int64_t lo, int64_t hi);
// Window for the turn-based game: rows lo..hi, chains up to length j_max.
std::function<bool(const StateId&)> tb_window(int64_t hi, int64_t j_max);

// ---- strategies ----

enum class Form { Concurrent, TurnBased };

// Action 1 with probability 1/(n+1)^2 at c_i, i = x+N-n; in the turn-based
// game the chain c_i -> c_{i,j} -> d_{i,j} with j = (n+1)^2.
Strategy max_bm_strategy(int64_t x, int64_t N, Form form = Form::Concurrent);

// Minimizer at the Big Match nodes (concurrent c_i or turn-based d states).
// Elsewhere the first choice.
Strategy min_fair_coin();
Strategy min_always(uint64_t action);

// Memoryless Maximizer strategy on the concurrent games: action 1 with
// probability f(i) at c_i.
struct RateFn {
  std::string name;
  std::function<double(int64_t)> f;
  SequenceOracle certificate;  // the sequence f(first), f(first+1), ...
};
Strategy mr_from_f(const RateFn& f);
RateFn inv_square_rate();          // f(k) = 1/(k+1)^2
RateFn constant_rate(double c);    // f(k) = c

struct MrCounter {
  Strategy strategy;
  ProductClass sum_class = ProductClass::Undecided;
  std::function<double(int64_t)> bound;  // attainment bound from c_x
};
// Counter-strategy to a memoryless Maximizer strategy carrying a rate certificate.
MrCounter min_vs_mr(const Strategy& sigma, uint64_t n_check = 200);

// Turn-based hazard strategy: at c_{i,1} go to d_{i,1} with probability a,
// otherwise walk to c_{i,J(i)} and stop there, so the level-i stopping
// hazard is f(i,t) = a + (1-a)/J(i). Requires f(i,t) >= 1/J(i).
struct HazardSpec {
  std::string name;
  std::function<double(int64_t, uint64_t)> f;  // desired hazard at c_i entered at time t
  std::function<int64_t(int64_t)> J;
  bool markov = true;
};
Strategy hazard_max(const HazardSpec& spec);

struct MarkovExample {
  Strategy strategy;
  AccumulationOracle oracle;
  ProductClass sum_class;
  HazardSpec spec;
};
// f(i,t) = (1/(i+1)^2)(1 + 1/(t+1))
MarkovExample markov_summable_example();
// f(i,t) = min(1, 1/i + 1/(t+1))
MarkovExample markov_divergent_example();
// Memoryless turn-based hazard with f = rate, J given.
Strategy mr_hazard(const RateFn& rate, std::function<int64_t(int64_t)> J);

// Almost-surely winning Maximizer strategy for the infinitely branching games.
// The per-entry horizons h_x are computed lazily and memoized.
struct AsWinningInfo {
  double level = 0.25;  // bounded reach level demanded of each entry
  int64_t inner_N = 2;  // parameter N of the entry strategy
  uint64_t max_horizon = 1u << 20;
};
Strategy max_as_winning(GamePtr game, const AsWinningInfo& info = {});
// The memoized horizon for entry c_x.
uint64_t as_winning_horizon(int64_t x, const AsWinningInfo& info = {});

enum class SumClass { Summable, Divergent };

struct MarkovCounter {
  Strategy strategy;
  // Entry index chosen on the n-th visit to u (n >= 1).
  std::function<int64_t(uint64_t)> entry;
  std::function<double(uint64_t)> cycle_eps;
};
MarkovCounter min_vs_markov(const AccumulationOracle& oracle, SumClass cls, double eps);

Strategy opt_max_conc_optmax();
Strategy opt_min_infbranch();

struct ExploitResult {
  Strategy strategy;
  std::vector<double> X;  // per opponent mode
  double Y = 0.0;
  int64_t i = 0;
  double margin = 0.0;
  double bound = 0.0;  // proved attainment bound of (strategy, opponent)
};
// Pure counter to a finite-memory opponent on conc_optmax (opponent Maximizer)
// or infbranch_optmin (opponent Minimizer).
ExploitResult exploit_fr(const Game& game, const Strategy& fr_opponent);

// ---- claim registry ----

struct ClaimInfo {
  std::string id;
  std::string theorem_ref;
  std::string parameters;  // default experiment parameters, `key=value` separated by ';'
};
const std::vector<ClaimInfo>& claims();
std::optional<ClaimInfo> find_claim(const std::string& id);
// The registry as CSV text (id,theorem_ref,parameters).
std::string claims_table();

}  // namespace cg::catalog
