#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cg/game.hpp"
#include "cg/numerics.hpp"

namespace cg {

using Mode = uint64_t;

enum class Visibility { Public, Private };

struct MemorySpec {
  std::optional<uint64_t> mode_count = 1;  // nullopt: unbounded
  Mode initial_mode = 0;
  Visibility visibility = Visibility::Public;
  bool uses_step_counter = false;

  bool bounded() const { return mode_count.has_value(); }
  bool memoryless() const { return mode_count && *mode_count == 1; }
};

// What the memory update observes after one step. For turn nodes the owner's
// choice index sits in the owner's slot and the other slot is 0.
struct ActionProfile {
  uint64_t a = 0;
  uint64_t b = 0;
  const StateId* next = nullptr;
};

// Action rule plus memory-update rule. At concurrent nodes `act` returns a mix
// over the owner's actions; at the owner's turn nodes a mix over choice
// indices (the k-th successor in the game's enumeration). It is never called
// elsewhere. A null `update` keeps the mode.
class Strategy {
 public:
  using ActFn = std::function<Mix(const StateId&, Mode, uint64_t)>;
  using UpdateFn = std::function<Mix(const StateId&, const ActionProfile&, Mode, uint64_t)>;

  Strategy() = default;
  Strategy(std::string name, Player owner, MemorySpec spec, ActFn act, UpdateFn update = {}, bool deterministic = false)
      : name_(std::move(name)),
        owner_(owner),
        spec_(spec),
        act_(std::move(act)),
        update_(std::move(update)),
        deterministic_(deterministic) {}

  static Strategy memoryless(std::string name, Player owner, std::function<Mix(const StateId&)> f,
                             bool deterministic = false);
  static Strategy markov(std::string name, Player owner, std::function<Mix(const StateId&, uint64_t)> f,
                         bool deterministic = false);

  const std::string& name() const { return name_; }
  Player owner() const { return owner_; }
  const MemorySpec& spec() const { return spec_; }
  bool deterministic() const { return deterministic_; }
  bool has_update() const { return bool(update_); }

  // True when the decision rule acts at `s` (the owner moves there).
  static bool acts_at(Player owner, NodeKind k) {
    return k == NodeKind::Concurrent || (owner == Player::Max ? k == NodeKind::MaxTurn : k == NodeKind::MinTurn);
  }

  Mix act(const StateId& s, Mode m, uint64_t t) const { return act_(s, m, t); }
  Mix update(const StateId& s, const ActionProfile& ap, Mode m, uint64_t t) const {
    if (!update_) return Mix::dirac(m);
    return update_(s, ap, m, t);
  }

  // Declares that neither rule depends on chains of single-successor random
  // states: the mode is kept across them and time is only read at own nodes.
  // Lets exact sweeps jump over such chains.
  bool forced_transparent = true;
  // Optional analytic description used by counter-strategy constructors.
  std::function<double(int64_t)> f_of_i;
  // Summability certificate for f_of_i, when the constructor knows one.
  std::optional<SequenceOracle> rate_certificate;

 private:
  std::string name_;
  Player owner_ = Player::Max;
  MemorySpec spec_;
  ActFn act_;
  UpdateFn update_;
  bool deterministic_ = false;
};

struct ValidationReport {
  std::vector<std::string> violations;
  size_t checks = 0;
  bool ok() const { return violations.empty(); }
};

// Samples the first `sample_states` canonical states of `game`, a few modes and
// `sample_times` times, and checks the memory-spec and strategy invariants.
ValidationReport validate(const Strategy& strategy, const Game& game, size_t sample_states, size_t sample_times);

// The memoryless strategy obtained by freezing the initial mode and time t.
Strategy restrict_time_constant(const Strategy& strategy, uint64_t t);

// Interface to a Markov Maximizer strategy's per-index accumulation behavior:
// f_at(i,t) and its liminf f(i), with witness times on either side.
struct AccumulationOracle {
  std::function<double(int64_t)> f_limit;
  std::function<double(int64_t, uint64_t)> f_at;
  std::function<uint64_t(int64_t, double, uint64_t)> witness_ge;
  std::function<uint64_t(int64_t, double, uint64_t)> witness_le;
  // Certificates for the series of limits f(1), f(2), ...
  SequenceOracle limit_series;
  // inf_t f(i,t) when known in closed form.
  std::function<double(int64_t)> f_floor;
};

// Checks that witnesses satisfy their inequalities on `checks` random triples.
std::vector<std::string> check_oracle(const AccumulationOracle& o, size_t checks, uint64_t seed, int64_t max_i = 30);

}  // namespace cg
