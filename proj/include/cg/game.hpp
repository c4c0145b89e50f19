#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cg/dist.hpp"
#include "cg/state_id.hpp"

namespace cg {

enum class Player { Max, Min };
enum class NodeKind { MaxTurn, MinTurn, Random, Concurrent };

inline Player opponent(Player p) { return p == Player::Max ? Player::Min : Player::Max; }

// Number of choices; nullopt means countably infinite.
using Count = std::optional<uint64_t>;

// A family of states sharing a tag: a bijection between tuples of naturals
// (params followed by nest entries) and states. Families enter the canonical
// enumeration `offset` levels late, which keeps finite families such as
// `lose` from crowding the first indices.
struct Family {
  Tag tag;  // Tag::Count_ admits any tag (used for nested copies)
  size_t arity = 0;  // tuple length; 0 means a single state
  uint64_t offset = 0;
  std::function<StateId(const std::vector<uint64_t>&)> make;
  std::function<std::optional<std::vector<uint64_t>>(const StateId&)> unmake;
};

// Over-approximation of what Maximizer can still obtain after leaving a
// truncation window through a given exit state: a list of options, each a
// distribution over {win, lose, state inside the window}.
struct GadgetOutcome {
  enum Kind { Win, Lose, State } kind;
  StateId state;
  double p;
};
using GadgetOption = std::vector<GadgetOutcome>;
struct TailCertificate {
  std::string name;
  std::function<std::optional<std::vector<GadgetOption>>(const StateId& exit)> gadget;
};

class Game {
 public:
  virtual ~Game() = default;

  virtual std::string name() const = 0;
  virtual NodeKind kind(const StateId& s) const = 0;
  virtual bool is_target(const StateId& s) const = 0;
  // Actions of `p` at s. Turn nodes give their owner the successor choices and
  // the other player a single dummy action; Random nodes give 1 to both.
  virtual Count num_actions(const StateId& s, Player p) const = 0;
  virtual Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const = 0;

  virtual std::vector<Family> families() const { return {}; }
  virtual std::optional<StateId> start_hint() const { return std::nullopt; }
  virtual std::vector<TailCertificate> tail_certificates(int64_t /*radius*/) const { return {}; }

  // For states starting a chain of single-successor random states, returns the
  // state reached after min(chain length, max_steps) steps and the step count.
  virtual std::optional<std::pair<StateId, uint64_t>> skip_forced(const StateId& /*s*/,
                                                                   uint64_t /*max_steps*/) const {
    return std::nullopt;
  }

  // Convenience: the action of the player owning a turn node, or a Random transition.
  Dist<StateId> choose(const StateId& s, uint64_t k) const;
  // Successor of a turn node whose choice `k` is deterministic.
  StateId successor(const StateId& s, uint64_t k) const;
};

// Canonical enumeration over families: level L lists, in family order, the
// element with Cantor index L - offset of every infinite family and the single
// element of every finite family with offset L.
StateId canonical_state(const std::vector<Family>& fams, uint64_t k);
std::optional<uint64_t> canonical_index(const std::vector<Family>& fams, const StateId& s);

// First `limit` states of the game's canonical enumeration.
std::vector<StateId> enumerate_states(const Game& g, size_t limit);

}  // namespace cg
