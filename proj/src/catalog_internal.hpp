#pragma once

#include <stdexcept>
#include <string>

#include "cg/catalog.hpp"

namespace cg::catalog::detail {

// Family over states (tag, params) with an empty nest; `to` maps the Cantor
// tuple to params, `from` inverts it (nullopt when out of range).
inline Family plain_family(Tag tag, size_t arity, uint64_t offset, std::function<Params(const std::vector<uint64_t>&)> to,
                           std::function<std::optional<std::vector<uint64_t>>(const Params&)> from) {
  Family f;
  f.tag = tag;
  f.arity = arity;
  f.offset = offset;
  f.make = [tag, to](const std::vector<uint64_t>& xs) { return StateId(tag, to(xs), {}); };
  f.unmake = [tag, from](const StateId& s) -> std::optional<std::vector<uint64_t>> {
    if (s.tag != tag || !s.nest.empty()) return std::nullopt;
    return from(s.params);
  };
  return f;
}

inline Family single_family(const StateId& id, uint64_t offset) {
  Family f;
  f.tag = id.tag;
  f.arity = 0;
  f.offset = offset;
  f.make = [id](const std::vector<uint64_t>&) { return id; };
  f.unmake = [id](const StateId& s) -> std::optional<std::vector<uint64_t>> {
    if (s == id) return std::vector<uint64_t>{};
    return std::nullopt;
  };
  return f;
}

// Naturals i >= base.
inline Family index_family(Tag tag, int64_t base, uint64_t offset = 0) {
  return plain_family(
      tag, 1, offset, [base](const std::vector<uint64_t>& x) { return Params{int64_t(x[0]) + base}; },
      [base](const Params& p) -> std::optional<std::vector<uint64_t>> {
        if (p.size() != 1 || p[0] < base) return std::nullopt;
        return std::vector<uint64_t>{uint64_t(p[0] - base)};
      });
}

// Pairs (i, j) with i >= bi, j >= bj.
inline Family pair_family(Tag tag, int64_t bi, int64_t bj, uint64_t offset = 0) {
  return plain_family(
      tag, 2, offset,
      [bi, bj](const std::vector<uint64_t>& x) { return Params{int64_t(x[0]) + bi, int64_t(x[1]) + bj}; },
      [bi, bj](const Params& p) -> std::optional<std::vector<uint64_t>> {
        if (p.size() != 2 || p[0] < bi || p[1] < bj) return std::nullopt;
        return std::vector<uint64_t>{uint64_t(p[0] - bi), uint64_t(p[1] - bj)};
      });
}

[[noreturn]] inline void bad_state(const std::string& game, const StateId& s) {
  throw std::invalid_argument(game + ": not a state: " + encode(s));
}

inline Dist<StateId> two_way(const StateId& x, Prob px, const StateId& y, Prob py) {
  if (px.v <= 0) return Dist<StateId>::dirac(y);
  if (py.v <= 0) return Dist<StateId>::dirac(x);
  return Dist<StateId>::finite({{x, px}, {y, py}});
}

inline bool is_c(const StateId& s) { return s.tag == Tag::C && s.params.size() == 1; }

}  // namespace cg::catalog::detail
