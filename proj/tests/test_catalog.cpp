#include "doctest.h"

#include <set>

#include "cg/catalog.hpp"

using namespace cg;
namespace cat = cg::catalog;

namespace {

StateId only(const Dist<StateId>& d) {
  REQUIRE(d.is_finite());
  REQUIRE(d.size() == 1);
  return d.at(0).first;
}

double mass_at(const Dist<StateId>& d, const StateId& s, double budget = 1e-15) {
  double m = 0;
  d.for_each([&](const StateId& x, double p) { if (x == s) m += p; }, budget);
  return m;
}

}  // namespace

TEST_CASE("big match on N: one step") {
  auto bm = cat::big_match_N();
  CHECK(bm->kind(cat::c(3)) == NodeKind::Concurrent);
  CHECK(only(bm->transition(cat::c(3), 1, 1)) == cat::c(0));
  CHECK(only(bm->transition(cat::c(3), 0, 1)) == cat::c(4));
  CHECK(only(bm->transition(cat::c(3), 0, 0)) == cat::c(2));
  CHECK(only(bm->transition(cat::c(3), 1, 0)) == cat::lose());
  CHECK(bm->is_target(cat::c(0)));
  CHECK_FALSE(bm->is_target(cat::lose()));
  CHECK_THROWS(bm->kind(cat::c(-1)));
}

TEST_CASE("big match on Z: the stop resolves to win") {
  auto bz = cat::big_match_Z(5);
  CHECK(only(bz->transition(cat::c(0), 1, 1)) == cat::win());
  CHECK(only(bz->transition(cat::c(0), 0, 0)) == cat::c(-1));
  CHECK(bz->is_target(cat::c(-5)));
  CHECK_FALSE(bz->is_target(cat::c(-4)));
}

TEST_CASE("turn-based big match: rows, chains and resolution") {
  auto tb = cat::tb_big_match_N();
  auto r = tb->transition(cat::r0(4, 3), 0, 0);
  CHECK(mass_at(r, cat::c(3)) == doctest::Approx(2.0 / 3));
  CHECK(mass_at(r, cat::lose()) == doctest::Approx(1.0 / 3));
  bool exact = false;
  for (size_t k = 0; k < r.size(); ++k)
    if (r.at(k).first == cat::c(3)) exact = r.at(k).second.exact && *r.at(k).second.exact == Rational(2, 3);
  CHECK(exact);
  CHECK(tb->kind(cat::d(2, 1)) == NodeKind::MinTurn);
  CHECK(tb->num_actions(cat::d(2, 1), Player::Min) == Count{2});
  CHECK(only(tb->transition(cat::d(2, 1), 0, 0)) == cat::r0(2, 1));
  CHECK(only(tb->transition(cat::d(2, 1), 0, 1)) == cat::r1(2, 1));
  CHECK(only(tb->transition(cat::cij(2, 5), 1, 0)) == cat::cij(2, 6));
  CHECK(only(tb->transition(cat::cij(2, 5), 0, 0)) == cat::d(2, 5));
}

TEST_CASE("waiting chain b_{i,3} takes three steps back to c_i") {
  auto g = cat::inf_branch_no_markov();
  StateId s = cat::bij(4, 3);
  int steps = 0;
  while (s != cat::c(4) && steps < 10) {
    s = only(g->transition(s, 0, 0));
    ++steps;
  }
  CHECK(s == cat::c(4));
  CHECK(steps == 3);
  CHECK(only(g->transition(cat::b(4), 0, 2)) == cat::bij(4, 3));
  CHECK(!g->num_actions(cat::u(), Player::Min));  // countably many entries
}

TEST_CASE("concurrent optimal-max game: entry masses halve") {
  auto g = cat::conc_optmax();
  auto d = g->transition(cat::s0(), 0, 0);
  CHECK_FALSE(d.is_finite());
  for (int64_t k = 1; k <= 10; ++k) CHECK(d.at(uint64_t(k - 1)).second.v == doctest::Approx(std::ldexp(1.0, -int(k))));
  CHECK(d.tail_bound(10) == doctest::Approx(std::ldexp(1.0, -10)));
  auto a3 = g->transition(cat::s_prime(3), 0, 0);
  CHECK(mass_at(a3, cat::t_state()) == doctest::Approx(7.0 / 8));
  CHECK(only(g->transition(cat::s_dprime(3), 0, 0)) == cat::s_dprime(4));
}

TEST_CASE("infinitely branching optimal-min game") {
  auto g = cat::infbranch_optmin();
  CHECK(mass_at(g->transition(cat::s_dprime(3), 0, 0), cat::t_state()) == doctest::Approx(1.0 / 8));
  auto sp = g->transition(cat::s_prime(2), 0, 0);
  CHECK(mass_at(sp, cat::t_state()) == doctest::Approx(0.25));
  CHECK(mass_at(sp, cat::u()) == doctest::Approx(0.75));
  CHECK(only(g->transition(cat::u(), 0, 4)) == cat::s_dprime(5));
}

TEST_CASE("entry strategy probabilities") {
  auto st = cat::max_bm_strategy(1, 3);
  CHECK(st.act(cat::c(4), 0, 0).prob(1) == doctest::Approx(1.0));
  CHECK(st.act(cat::c(2), 0, 0).prob(1) == doctest::Approx(1.0 / 9));
  CHECK(st.act(cat::c(9), 0, 0).prob(1) == 0.0);
  REQUIRE(st.f_of_i);
  CHECK(st.f_of_i(1) == doctest::Approx(1.0 / 16));
  CHECK_THROWS(cat::max_bm_strategy(-1, 2));
}

TEST_CASE("counter-strategies to memoryless rates") {
  auto bm = cat::big_match_N();
  // Summable rate: push up, the stops above x carry at most the tail sum.
  auto up = cat::min_vs_mr(cat::mr_from_f(cat::inv_square_rate()));
  CHECK(up.sum_class == ProductClass::ConvergesPositive);
  CHECK(up.strategy.act(cat::c(3), 0, 0).prob(1) == 1.0);
  // Divergent rate: push down.
  auto down = cat::min_vs_mr(cat::mr_from_f(cat::constant_rate(0.3)));
  CHECK(down.sum_class == ProductClass::DivergesToZero);
  CHECK(down.strategy.act(cat::c(3), 0, 0).prob(0) == 1.0);
  for (int64_t x : {2, 5}) {
    auto r = forward_reach_exact(*bm, cat::mr_from_f(cat::constant_rate(0.3)), down.strategy, cat::c(x), 50);
    CHECK(r.interval.hi <= down.bound(x) + 1e-12);
    auto s = forward_reach_exact(*bm, cat::mr_from_f(cat::inv_square_rate()), up.strategy, cat::c(x), 400);
    CHECK(s.interval.lo <= up.bound(x) + 1e-12);
  }
  CHECK_THROWS(cat::min_vs_mr(cat::min_fair_coin()));
}

TEST_CASE("claim registry") {
  const auto& cl = cat::claims();
  CHECK(cl.size() == 13);
  std::set<std::string> ids;
  for (const auto& c : cl) {
    CHECK(ids.insert(c.id).second);
    CHECK_FALSE(c.theorem_ref.empty());
    auto f = cat::find_claim(c.id);
    REQUIRE(f);
    CHECK(f->parameters == c.parameters);
  }
  CHECK_FALSE(cat::find_claim("NOPE"));
  auto table = cat::claims_table();
  CHECK(table.rfind("id,theorem_ref,parameters", 0) == 0);
}
