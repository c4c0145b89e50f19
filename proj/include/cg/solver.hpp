#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cg/engine.hpp"
#include "cg/finite_game.hpp"
#include "cg/numerics.hpp"
#include "cg/strategy.hpp"

namespace cg {

// ---- matrix games ----

using Matrix = std::vector<std::vector<double>>;

struct MatrixSolution {
  double value = 0.0;
  std::vector<double> row;  // Maximizer mix
  std::vector<double> col;  // Minimizer mix
};

// Zero-sum value with optimal mixes. Closed form for 2x2, square-kernel
// enumeration up to 4x4.
MatrixSolution matrix_game_value(const Matrix& m);

// ---- value iteration on finite games ----

struct ViOptions {
  double tol = kSolverTol;
  uint64_t max_iters = 1'000'000;
  bool from_above = false;  // start at 1 on non-sink nodes instead of 0
  bool check_monotone = false;
  // "Sticky" mixes: a node's recorded Maximizer mix only changes when the
  // new stage value beats the old mix's value by more than this margin.
  double sticky_margin = 1e-12;
};

struct ViResult {
  std::vector<double> value;
  std::vector<std::vector<double>> max_mix;  // per node, over the node's Maximizer actions
  std::vector<std::vector<double>> min_mix;  // per node, over Minimizer actions
  std::vector<std::vector<double>> sticky_max_mix;
  uint64_t iterations = 0;
  bool converged = false;
  bool monotone = true;
};

ViResult value_iteration(const FiniteGame& g, const ViOptions& opts = {});

// Matrix of cell values at node i under value vector v.
Matrix stage_matrix(const FiniteGame& g, NodeIdx i, const std::vector<double>& v);

// Replaces Maximizer choices by fixed mixes (`mix[i]` empty leaves node i
// unchanged); fixing Minimizer works the same way with `player = Min`.
FiniteGame fix_mixes(const FiniteGame& g, const std::vector<std::vector<double>>& mix, Player player);

// Value of a memoryless Maximizer mix table against Minimizer's best response.
std::vector<ValueInterval> memoryless_attainment(const FiniteGame& g, const std::vector<std::vector<double>>& mix);

// ---- bounded horizon and truncated values ----

struct BoundedOptions {
  size_t max_states = 2'000'000;
  uint64_t branch_budget = 4096;
  double tail_budget = 1e-15;
};

std::map<StateId, double> bounded_reach_value(const Game& game, const std::vector<StateId>& starts, uint64_t n,
                                              const BoundedOptions& opts = {});

struct BoundsStep {
  int64_t radius = 0;
  ValueInterval bracket;
  size_t states = 0;
  std::string certificate;
};

struct BoundsResult {
  ValueInterval interval;
  std::vector<BoundsStep> steps;
  bool closed = false;  // width < tol reached
};

// Lower end from the pessimistic truncation. Upper end: Minimizer's stationary
// mixes are read off value iteration on the optimistic (or certified) game and
// Maximizer's best response against them is bounded from above.
BoundsResult value_bounds(const Game& game, const StateId& start, const std::vector<Truncation>& schedule, double tol);

// Pointwise brackets of one truncation for every state it explores.
struct TruncatedBrackets {
  std::unordered_map<StateId, double> lower;
  std::unordered_map<StateId, double> upper;
  size_t states = 0;
  std::string certificate;  // name of the certificate giving the upper end, if any
  ValueInterval at(const StateId& s) const;
};
TruncatedBrackets truncated_brackets(const Game& game, const Truncation& t);

// Sound upper bound on the value of a finite game: Maximizer's best response
// against Minimizer's stationary mixes from value iteration.
std::vector<double> upper_via_min_mixes(const FiniteGame& g, const ViResult& vi);

// ---- constructive procedures ----

// MD Minimizer strategy picking, at Minimizer turn nodes, the first successor s'
// with val(s') <= val(s) (1 + ln(1+eps) 2^{-iota(s)}).
Strategy acyclic_min_md(const Game& game, std::function<double(const StateId&)> values, double eps,
                        std::function<uint64_t(const StateId&)> iota, uint64_t enumeration_budget = 1 << 16);

// Acyclic game on S x N; (s,i) has the successors (t,i+1).
std::shared_ptr<Game> clock_expand(std::shared_ptr<const Game> game);
StateId clock_id(const StateId& s, uint64_t i);
// Positional strategy on the expansion read as a Markov strategy on the base game.
Strategy clock_pullback(const Strategy& positional);
// Markov strategy on the base game as a positional one on the expansion.
Strategy clock_lift(const Strategy& markov);

// Two copies of every state; Maximizer picks the copy of the successor
// together with his action.
std::shared_ptr<Game> layer(std::shared_ptr<const Game> game);
StateId layer_id(const StateId& s, int bit);
std::optional<std::pair<StateId, int>> layer_parts(const StateId& s);
// Memoryless strategy on a layered game as a public 1-bit strategy on the base game.
Strategy read_back_one_bit(std::function<Mix(const StateId&)> layered_mix, const std::string& name);

struct NonUniformResult {
  std::vector<std::vector<double>> mix;  // per node of the input game; empty = unconstrained
  std::vector<NodeIdx> region;
  uint64_t horizon = 0;
  std::vector<double> attained;  // per start, verified against best response
  std::vector<double> values;    // per start
  std::string candidate;         // which candidate passed
  bool ok = false;
};

// Memoryless strategy and finite region with attainment >= val - eps from each start.
NonUniformResult non_uniform_memoryless(const FiniteGame& g, const std::vector<NodeIdx>& starts, double eps);

struct PlasterRound {
  std::vector<StateId> s0, s1, f0, f1;
  double epsilon = 0.0;
  std::string candidate;
};

struct PlasterLedger {
  std::vector<PlasterRound> rounds;
  // Fixed mixes on the layered game, by layered state.
  std::map<StateId, std::vector<double>> fixings;
  std::vector<std::string> invariant_violations;
  bool ok() const { return invariant_violations.empty(); }
};

// Plasters a finite layered game (from `layer` applied to a finite game),
// fixing base states in `order` round by round with eps_i = 2^{-i} eps.
PlasterLedger plaster(const FiniteGame& layered, double eps, const std::vector<StateId>& order);

// The final memoryless mix at a layered state, or uniform when unfixed.
std::function<Mix(const StateId&)> ledger_mix(const PlasterLedger& ledger, const FiniteGame& layered);

}  // namespace cg
