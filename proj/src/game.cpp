#include "cg/game.hpp"

#include <stdexcept>

namespace cg {

Dist<StateId> Game::choose(const StateId& s, uint64_t k) const {
  switch (kind(s)) {
    case NodeKind::MaxTurn:
      return transition(s, k, 0);
    case NodeKind::MinTurn:
      return transition(s, 0, k);
    case NodeKind::Random:
      return transition(s, 0, 0);
    case NodeKind::Concurrent:
      break;
  }
  throw std::logic_error("Game::choose on concurrent node " + encode(s));
}

StateId Game::successor(const StateId& s, uint64_t k) const {
  auto d = choose(s, k);
  if (!d.is_finite() || d.size() != 1) throw std::logic_error("Game::successor: not deterministic at " + encode(s));
  return d.at(0).first;
}

namespace {

uint64_t level_count(const std::vector<Family>& fams, uint64_t level) {
  uint64_t n = 0;
  for (const auto& f : fams) {
    if (f.arity == 0)
      n += (f.offset == level);
    else
      n += (f.offset <= level);
  }
  return n;
}

bool all_finite(const std::vector<Family>& fams) {
  for (const auto& f : fams)
    if (f.arity > 0) return false;
  return true;
}

}  // namespace

StateId canonical_state(const std::vector<Family>& fams, uint64_t k) {
  if (fams.empty()) throw std::out_of_range("canonical_state: game has no families");
  uint64_t max_offset = 0;
  for (const auto& f : fams) max_offset = std::max(max_offset, f.offset);
  bool finite_only = all_finite(fams);
  for (uint64_t level = 0;; ++level) {
    if (finite_only && level > max_offset) throw std::out_of_range("canonical_state: index beyond finite game");
    uint64_t c = level_count(fams, level);
    if (k >= c) {
      k -= c;
      continue;
    }
    for (const auto& f : fams) {
      bool present = f.arity == 0 ? f.offset == level : f.offset <= level;
      if (!present) continue;
      if (k == 0) {
        if (f.arity == 0) return f.make({});
        return f.make(cantor_unpack(level - f.offset, f.arity));
      }
      --k;
    }
  }
}

std::optional<uint64_t> canonical_index(const std::vector<Family>& fams, const StateId& s) {
  for (size_t fi = 0; fi < fams.size(); ++fi) {
    const auto& f = fams[fi];
    if (f.tag != Tag::Count_ && f.tag != s.tag) continue;
    auto tup = f.unmake(s);
    if (!tup) continue;
    uint64_t level = f.arity == 0 ? f.offset : cantor_pack(*tup) + f.offset;
    uint64_t k = 0;
    for (uint64_t l = 0; l < level; ++l) k += level_count(fams, l);
    for (size_t fj = 0; fj < fi; ++fj) {
      const auto& g = fams[fj];
      k += g.arity == 0 ? (g.offset == level) : (g.offset <= level);
    }
    return k;
  }
  return std::nullopt;
}

std::vector<StateId> enumerate_states(const Game& g, size_t limit) {
  std::vector<StateId> out;
  if (limit == 0) return out;
  auto fams = g.families();
  if (fams.empty()) return out;
  out.reserve(limit);
  uint64_t max_offset = 0;
  for (const auto& f : fams) max_offset = std::max(max_offset, f.offset);
  bool finite_only = all_finite(fams);
  for (uint64_t level = 0; out.size() < limit; ++level) {
    if (finite_only && level > max_offset) break;
    for (const auto& f : fams) {
      if (out.size() >= limit) break;
      if (f.arity == 0) {
        if (f.offset == level) out.push_back(f.make({}));
      } else if (f.offset <= level) {
        out.push_back(f.make(cantor_unpack(level - f.offset, f.arity)));
      }
    }
  }
  return out;
}

}  // namespace cg
