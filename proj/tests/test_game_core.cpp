#include "doctest.h"

#include <random>
#include <set>

#include "cg/catalog.hpp"
#include "cg/solver.hpp"

using namespace cg;
namespace cat = cg::catalog;

namespace {

std::vector<cat::GamePtr> all_games() {
  return {cat::big_match_Z(10),      cat::big_match_N(),  cat::tb_big_match_N(), cat::inf_branch_no_mr(),
          cat::inf_branch_no_markov(), cat::nested(2),     cat::combined(),       cat::conc_optmax(),
          cat::infbranch_optmin()};
}

}  // namespace

TEST_CASE("state ids: equality is field-wise") {
  CHECK(cat::c(3) == StateId(Tag::C, {3}));
  CHECK(cat::c(3) != cat::c(4));
  CHECK(cat::c(3) != StateId(Tag::B, {3}));
  CHECK(StateId(Tag::C, {3}, {1}) != cat::c(3));
  CHECK(hash_value(cat::cij(2, 5)) == hash_value(StateId(Tag::Cij, {2, 5})));
}

TEST_CASE("state ids: text form round-trips") {
  for (const auto& s : {cat::c(0), cat::c(-7), cat::bijl(3, 9, 2), cat::lose(), StateId(Tag::C, {4}, {1, 2})}) {
    auto back = decode(encode(s));
    REQUIRE(back);
    CHECK(*back == s);
  }
  CHECK(encode(cat::c(3)) == "c(3)");
  CHECK_FALSE(decode("nonsense(1"));
  CHECK_FALSE(decode("zz(1)"));
}

TEST_CASE("state ids: wrap and unwrap") {
  StateId inner(Tag::Cij, {4, 2}, {3});
  auto w = wrap(Tag::Layer1, inner, {7});
  auto u = unwrap(w);
  REQUIRE(u);
  CHECK(u->first == inner);
  CHECK(u->second == std::vector<int64_t>{7});
  CHECK_FALSE(unwrap(cat::c(2)));
}

TEST_CASE("cantor pairing is a bijection on a prefix") {
  std::set<uint64_t> seen;
  for (uint64_t a = 0; a < 60; ++a)
    for (uint64_t b = 0; b < 60; ++b) {
      uint64_t z = cantor_pair(a, b);
      CHECK(cantor_unpair(z) == std::make_pair(a, b));
      seen.insert(z);
    }
  CHECK(seen.size() == 3600);
  for (uint64_t z = 0; z < 500; ++z) CHECK(cantor_pack(cantor_unpack(z, 3)) == z);
  for (int64_t v = -50; v <= 50; ++v) CHECK(unzigzag(zigzag(v)) == v);
}

TEST_CASE("rationals") {
  Rational a(2, 4);
  CHECK(a.num() == 1);
  CHECK(a.den() == 2);
  CHECK(*Rational::add(Rational(1, 3), Rational(1, 6)) == Rational(1, 2));
  CHECK(*Rational::mul(Rational(2, 3), Rational(3, 4)) == Rational(1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(*Rational::pow2_inv(10) == Rational(1, 1024));
  CHECK_FALSE(Rational::pow2_inv(70));
  CHECK_THROWS(Rational(1, 0));
  Prob p = Prob::ratio(1, 3);
  CHECK(p.complement().exact == Rational(2, 3));
  CHECK((p * Prob::ratio(3, 4)).exact == Rational(1, 4));
}

TEST_CASE("enumeration: prefixes") {
  auto bm = cat::big_match_N();
  auto first = enumerate_states(*bm, 3);
  CHECK(first == std::vector<StateId>{cat::c(0), cat::c(1), cat::c(2)});
  CHECK(enumerate_states(*bm, 0).empty());
  CHECK(enumerate_states(*bm, 40) == enumerate_states(*bm, 40));

  auto n2 = cat::nested(2);
  auto states = enumerate_states(*n2, 50);
  CHECK(states.size() == 50);
  std::set<std::string> distinct;
  for (const auto& s : states) {
    distinct.insert(encode(s));
    CHECK(s.nest.size() <= 1);
    auto back = decode(encode(s));
    REQUIRE(back);
    CHECK(*back == s);
  }
  CHECK(distinct.size() == 50);
}

TEST_CASE("enumeration: canonical index inverts canonical state") {
  for (const auto& g : all_games()) {
    auto fams = g->families();
    auto states = enumerate_states(*g, 300);
    for (size_t k = 0; k < states.size(); ++k) {
      CHECK(canonical_state(fams, k) == states[k]);
      auto idx = canonical_index(fams, states[k]);
      REQUIRE(idx);
      CHECK(*idx == k);
    }
  }
}

TEST_CASE("enumeration: text round-trip on 10^4 states of every game") {
  for (const auto& g : all_games()) {
    auto states = enumerate_states(*g, 10000);
    CHECK(states.size() == 10000);
    size_t bad = 0;
    for (const auto& s : states) {
      auto back = decode(encode(s));
      if (!back || *back != s) ++bad;
    }
    CHECK_MESSAGE(bad == 0, g->name());
  }
}

TEST_CASE("distributions: finite mass and countable tails") {
  auto d = Dist<int>::finite({{1, Prob::ratio(1, 3)}, {2, Prob::ratio(2, 3)}});
  CHECK(d.size() == 2);
  CHECK(d.tail_bound(1) == doctest::Approx(2.0 / 3));
  CHECK(d.tail_bound(2) == 0.0);
  auto geo = Dist<int>::countable([](uint64_t k) { return Dist<int>::Item(int(k), std::ldexp(1.0, -int(k) - 1)); },
                                  [](uint64_t n) { return std::ldexp(1.0, -int(n)); });
  auto [n, tail] = geo.for_each([](int, double) {}, 1e-6);
  CHECK(tail <= 1e-6);
  CHECK(n == 20);
  auto m = geo.map<int>([](int x) { return x * 2; });
  CHECK(m.at(3).first == 6);
}

TEST_CASE("games: transition mass on reachable random and concurrent nodes") {
  for (const auto& g : all_games()) {
    auto states = enumerate_states(*g, 1000);
    for (const auto& s : states) {
      NodeKind k = g->kind(s);
      auto na = g->num_actions(s, Player::Max), nb = g->num_actions(s, Player::Min);
      CHECK((!na || *na >= 1));
      CHECK((!nb || *nb >= 1));
      if (k == NodeKind::MaxTurn || k == NodeKind::MinTurn) continue;
      uint64_t amax = na ? std::min<uint64_t>(*na, 2) : 2, bmax = nb ? std::min<uint64_t>(*nb, 2) : 2;
      for (uint64_t a = 0; a < amax; ++a)
        for (uint64_t b = 0; b < bmax; ++b) {
          auto d = g->transition(s, a, b);
          double acc = 0;
          for (uint64_t i = 1; i <= 64; ++i) {
            if (d.is_finite() && i > d.size()) break;
            acc += d.at(i - 1).second.v;
            CHECK(d.at(i - 1).second.v >= 0.0);
            CHECK(std::abs(1.0 - acc) <= d.tail_bound(i) + 1e-12);
          }
          if (d.is_finite()) CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
  }
}

TEST_CASE("games: targets are absorbing") {
  for (const auto& g : all_games()) {
    for (const auto& s : enumerate_states(*g, 500)) {
      if (!g->is_target(s)) continue;
      auto d = g->transition(s, 0, 0);
      REQUIRE(d.is_finite());
      CHECK(d.size() == 1);
      CHECK(d.at(0).first == s);
    }
  }
}

TEST_CASE("truncation: pessimistic below optimistic") {
  auto bm = cat::big_match_N();
  std::vector<StateId> window;
  for (int i = 0; i <= 5; ++i) window.push_back(cat::c(i));
  window.push_back(cat::lose());
  auto pes = truncate(*bm, window, BoundaryPolicy::PessimisticMax);
  auto opt = truncate(*bm, window, BoundaryPolicy::OptimisticMax);
  auto vp = value_iteration(pes).value, vo = value_iteration(opt).value;
  for (const auto& s : window) CHECK(vp[pes.at(s)] <= vo[opt.at(s)] + 1e-9);
  CHECK(pes.is_target(boundary_id()) == false);
  CHECK(opt.is_target(boundary_id()) == true);
  // Minimizer's upward move from c5 wins for Maximizer only in the optimistic game.
  CHECK(vo[opt.at(cat::c(5))] > vp[pes.at(cat::c(5))] + 0.01);
}

TEST_CASE("truncation: a window without target or boundary is flagged") {
  auto bm = cat::big_match_N();
  auto g = truncate(*bm, {cat::lose()}, BoundaryPolicy::PessimisticMax);
  CHECK(g.degenerate);
  CHECK_THROWS(truncate(*bm, {}, BoundaryPolicy::PessimisticMax));
}

TEST_CASE("truncation: Big Match on Z near 1/2 at K = 20") {
  auto g = cat::big_match_Z(20);
  Truncation t;
  t.inside = cat::bm_window(-20, 20);
  t.policy = BoundaryPolicy::Certified;
  t.radius = 20;
  t.starts = {cat::c(0)};
  auto res = value_bounds(*g, cat::c(0), {t}, 0.0);
  CHECK(res.interval.lo >= 0.45);
  CHECK(res.interval.hi <= 0.55 + 0.05);
  CHECK(std::abs(res.interval.mid() - 0.5) < 0.05);
}
