#pragma once

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cg {

// Role names for states of the parameterized games. The numeric order is the
// tag index used by canonical enumeration, so only append.
enum class Tag : uint16_t {
  C,
  Cij,
  D,
  R0,
  R1,
  U,
  B,
  Bij,
  Bijl,
  Lose,
  Win,
  SPrime,
  SDoublePrime,
  S0,
  T,
  F,
  Target,
  Sink,
  Layer0,
  Layer1,
  ClockWrapped,
  Boundary,
  Gadget,
  Product,
  Hub,
  Aux,
  Count_
};

std::string_view tag_name(Tag t);
std::optional<Tag> tag_from_name(std::string_view name);

using Params = boost::container::small_vector<int64_t, 4>;
using Nest = boost::container::small_vector<int64_t, 2>;

struct StateId {
  Tag tag = Tag::Sink;
  Params params;
  Nest nest;

  StateId() = default;
  StateId(Tag t, std::initializer_list<int64_t> ps = {}, std::initializer_list<int64_t> ns = {})
      : tag(t), params(ps), nest(ns) {}
  StateId(Tag t, Params ps, Nest ns) : tag(t), params(std::move(ps)), nest(std::move(ns)) {}

  int64_t p(size_t i) const { return params.at(i); }

  friend bool operator==(const StateId& a, const StateId& b) {
    return a.tag == b.tag && a.params == b.params && a.nest == b.nest;
  }
  friend bool operator!=(const StateId& a, const StateId& b) { return !(a == b); }
  friend bool operator<(const StateId& a, const StateId& b);
};

size_t hash_value(const StateId& s);

// Text form: `tag(p1,p2)@n1.n2`. Parameters may be negative; nest elements follow '@'.
std::string encode(const StateId& s);
std::optional<StateId> decode(std::string_view text);

// Wrapping embeds a whole StateId into the parameters of another one. Used by
// layering, clock expansion and product constructions.
StateId wrap(Tag outer, const StateId& inner, std::initializer_list<int64_t> extra = {});
// Returns (inner, extra) if `s` was produced by wrap.
std::optional<std::pair<StateId, std::vector<int64_t>>> unwrap(const StateId& s);

// Cantor pairing on naturals and its k-ary extension.
uint64_t cantor_pair(uint64_t a, uint64_t b);
std::pair<uint64_t, uint64_t> cantor_unpair(uint64_t z);
std::vector<uint64_t> cantor_unpack(uint64_t z, size_t k);
uint64_t cantor_pack(const std::vector<uint64_t>& xs);

// Bijection Z <-> N used for signed parameters.
inline uint64_t zigzag(int64_t v) { return v >= 0 ? uint64_t(v) * 2 : uint64_t(-(v + 1)) * 2 + 1; }
inline int64_t unzigzag(uint64_t u) { return (u & 1) ? -int64_t(u >> 1) - 1 : int64_t(u >> 1); }

}  // namespace cg

template <>
struct std::hash<cg::StateId> {
  size_t operator()(const cg::StateId& s) const noexcept { return cg::hash_value(s); }
};
