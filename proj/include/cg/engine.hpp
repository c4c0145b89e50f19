#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cg/finite_game.hpp"
#include "cg/numerics.hpp"
#include "cg/strategy.hpp"

namespace cg {

struct WeightedConfig {
  StateId state;
  Mode max_mode = 0;
  Mode min_mode = 0;
  uint64_t time = 0;
  double mass = 0.0;
};

enum class EstimateMethod { ExactSweep, MonteCarlo };

struct ReachEstimate {
  ValueInterval interval;
  EstimateMethod method = EstimateMethod::ExactSweep;
  uint64_t horizon = 0;
  uint64_t episodes = 0;  // Monte Carlo only
  uint64_t seed = 0;      // Monte Carlo only
  double pruned_mass = 0.0;
  double alive_mass = 0.0;
  double absorbed = 0.0;   // exact mass reaching the target (sweep) or hit fraction (Monte Carlo)
  double mass_error = 0.0;  // |absorbed + alive + pruned + retired + sunk - 1|; sunk = mass in non-target self-loops
  uint64_t configs = 0;
  std::vector<std::pair<uint64_t, double>> trace;  // (time, absorbed so far) when requested
};

struct SweepOptions {
  double mass_floor = 0.0;
  double tail_budget = 1e-15;  // mass of countable distributions left unenumerated, added to hi
  bool skip_forced = true;
  bool allow_unbounded_memory = false;
  bool record_trace = false;
  size_t max_configs = 50'000'000;
  // Called for every live configuration before it is expanded. A returned
  // bracket retires the configuration: its mass contributes mass*lo to the
  // lower and mass*hi to the upper end. Must be a sound bound on the reach
  // probability from that configuration.
  std::function<std::optional<ValueInterval>(const WeightedConfig&)> retire;
  // Bound for configurations still alive at the horizon; default [0,1].
  std::function<ValueInterval(const WeightedConfig&)> alive_bound;
};

// Exact forward sweep of the chain induced by (sigma, pi) up to `horizon` steps.
ReachEstimate forward_reach_exact(const Game& game, const Strategy& sigma, const Strategy& pi, const StateId& start,
                                  uint64_t horizon, double mass_floor = 0.0, const SweepOptions& opts = {});
ReachEstimate forward_reach_exact(const Game& game, const Strategy& sigma, const Strategy& pi, const StateId& start,
                                  uint64_t horizon, const SweepOptions& opts);

struct McOptions {
  bool skip_forced = true;
  unsigned threads = 0;  // 0: hardware concurrency capped by CG_THREADS
  uint64_t max_enumeration = 1u << 20;
};

// Monte Carlo estimate of P(reach within horizon) with a Wilson interval.
ReachEstimate simulate_mc(const Game& game, const Strategy& sigma, const Strategy& pi, const StateId& start,
                          uint64_t horizon, uint64_t episodes, uint64_t seed, double confidence = 0.99,
                          const McOptions& opts = {});

// Per-episode generator seed.
uint64_t episode_seed(uint64_t seed, uint64_t episode);
unsigned worker_threads();

// State of the product of a game with a fixed strategy's memory (and time,
// when the strategy reads the step counter).
StateId product_id(const StateId& base, Mode m, std::optional<uint64_t> t = std::nullopt);
struct ProductParts {
  StateId base;
  Mode mode;
  std::optional<uint64_t> time;
};
std::optional<ProductParts> product_parts(const StateId& s);

struct InduceOptions {
  std::optional<uint64_t> time_horizon;  // required for step-counter strategies
};

// MDP for the opponent of `fixed`: the product of game and fixed's memory,
// restricted to the truncation window (on base states) and explored from its
// starts paired with the initial mode.
FiniteGame induce_mdp(const Game& game, const Strategy& fixed, const Truncation& truncation,
                      const InduceOptions& opts = {});

struct BestResponseOptions {
  double tol = kSolverTol;
  uint64_t max_iters = 2'000'000;
  bool upper = true;  // also compute a sound upper end
};

// Reach value of a finite one-player game (every non-random node belongs to
// `optimizing`) as a bracket per node: lower end from value iteration from 0,
// upper end from exact evaluation of a greedy policy (Minimizer) or interval
// iteration after end-component collapse (Maximizer).
std::vector<ValueInterval> best_response_value(const FiniteGame& mdp, Player optimizing,
                                               const BestResponseOptions& opts = {});

// Chain reach probabilities of a finite game whose choices are fixed by
// `choice[node]` (cell index offset within the node), solved exactly.
std::vector<double> evaluate_policy(const FiniteGame& g, const std::vector<uint32_t>& choice);

}  // namespace cg
