#include "doctest.h"

#include "cg/catalog.hpp"

using namespace cg;
namespace cat = cg::catalog;

namespace {

void require_valid(const Strategy& s, const Game& g, size_t states = 100, size_t times = 10) {
  auto rep = validate(s, g, states, times);
  CHECK(rep.checks > 0);
  for (const auto& v : rep.violations) MESSAGE(v);
  CHECK_MESSAGE(rep.ok(), std::string(s.name() + " on " + g.name()));
}

}  // namespace

TEST_CASE("catalog strategies validate against their games") {
  auto bm = cat::big_match_N(), tb = cat::tb_big_match_N(), nomr = cat::inf_branch_no_mr(),
       nomarkov = cat::inf_branch_no_markov();
  require_valid(cat::min_fair_coin(), *bm);
  require_valid(cat::min_always(0), *bm);
  require_valid(cat::min_always(1), *bm);
  require_valid(cat::max_bm_strategy(0, 5), *bm);
  require_valid(cat::mr_from_f(cat::inv_square_rate()), *bm);
  require_valid(cat::mr_from_f(cat::constant_rate(0.3)), *bm);
  require_valid(cat::max_bm_strategy(1, 3, cat::Form::TurnBased), *tb);
  require_valid(cat::min_fair_coin(), *tb);
  require_valid(cat::mr_hazard(cat::inv_square_rate(), [](int64_t i) { return (i + 2) * (i + 2); }), *nomr);
  require_valid(cat::markov_summable_example().strategy, *nomarkov);
  require_valid(cat::markov_divergent_example().strategy, *nomarkov);
  auto ex = cat::markov_summable_example();
  require_valid(cat::min_vs_markov(ex.oracle, cat::SumClass::Summable, 0.1).strategy, *nomarkov);
  require_valid(cat::opt_max_conc_optmax(), *cat::conc_optmax());
  require_valid(cat::opt_min_infbranch(), *cat::infbranch_optmin());
  require_valid(cat::max_as_winning(nomr), *nomr, 30, 3);
}

TEST_CASE("validator flags illegal successors, time dependence and randomization") {
  auto bm = cat::big_match_N();
  auto illegal = Strategy::memoryless("illegal", Player::Max, [](const StateId&) { return Mix::dirac(5); });
  CHECK_FALSE(validate(illegal, *bm, 20, 2).ok());

  auto timed = Strategy("timed", Player::Max, MemorySpec{},
                        [](const StateId&, Mode, uint64_t t) { return Mix::dirac(t % 2); });
  CHECK_FALSE(validate(timed, *bm, 20, 4).ok());

  auto fake_md = Strategy::memoryless("coin", Player::Max, [](const StateId&) { return Mix::bernoulli(0, 1, 0.5); },
                                      true);
  CHECK_FALSE(validate(fake_md, *bm, 20, 2).ok());

  MemorySpec two;
  two.mode_count = 2;
  auto bad_update = Strategy(
      "bad-update", Player::Max, two, [](const StateId&, Mode, uint64_t) { return Mix::dirac(0); },
      [](const StateId&, const ActionProfile&, Mode, uint64_t) { return Mix::dirac(3); });
  CHECK_FALSE(validate(bad_update, *bm, 20, 2).ok());

  MemorySpec off;
  off.mode_count = 2;
  off.initial_mode = 2;
  CHECK_FALSE(validate(Strategy("off", Player::Max, off, [](const StateId&, Mode, uint64_t) { return Mix::dirac(0); }),
                       *bm, 5, 1)
                  .ok());
}

TEST_CASE("memory specs") {
  MemorySpec md;
  CHECK(md.memoryless());
  CHECK(md.bounded());
  MemorySpec un;
  un.mode_count = std::nullopt;
  CHECK_FALSE(un.bounded());
  auto mk = Strategy::markov("m", Player::Min, [](const StateId&, uint64_t) { return Mix::dirac(0); });
  CHECK(mk.spec().uses_step_counter);
  CHECK(mk.spec().memoryless());
}

TEST_CASE("freezing a Markov strategy at a time") {
  auto ex = cat::markov_summable_example();
  auto tb = cat::inf_branch_no_markov();
  auto f1 = restrict_time_constant(ex.strategy, 1000), f2 = restrict_time_constant(ex.strategy, 3);
  CHECK_FALSE(f1.spec().uses_step_counter);
  require_valid(f1, *tb);
  bool differs = false;
  for (const auto& s : enumerate_states(*tb, 200)) {
    if (!Strategy::acts_at(Player::Max, tb->kind(s))) continue;
    auto a = f1.act(s, 0, 0), b = f2.act(s, 0, 0), direct = ex.strategy.act(s, ex.strategy.spec().initial_mode, 1000);
    for (const auto& [k, p] : direct.items) CHECK(a.prob(k) == doctest::Approx(p));
    for (const auto& [k, p] : a.items)
      if (std::abs(b.prob(k) - p) > 1e-12) differs = true;
  }
  CHECK(differs);

  // Freezing a memoryless strategy changes nothing.
  auto bm = cat::big_match_N();
  auto mr = cat::mr_from_f(cat::inv_square_rate());
  auto fr = restrict_time_constant(mr, 77);
  for (const auto& s : enumerate_states(*bm, 100)) {
    if (!Strategy::acts_at(Player::Max, bm->kind(s))) continue;
    auto a = mr.act(s, 0, 5), b = fr.act(s, 0, 123);
    for (const auto& [k, p] : a.items) CHECK(b.prob(k) == doctest::Approx(p).epsilon(1e-15));
  }
}

TEST_CASE("memoryless catalog strategies are constant in time") {
  auto bm = cat::big_match_N();
  for (const auto& st : {cat::min_fair_coin(), cat::min_always(1), cat::max_bm_strategy(2, 4),
                         cat::mr_from_f(cat::constant_rate(0.3))}) {
    REQUIRE_FALSE(st.spec().uses_step_counter);
    for (const auto& s : enumerate_states(*bm, 100)) {
      if (bm->is_target(s) || !Strategy::acts_at(st.owner(), bm->kind(s))) continue;
      Mix ref = st.act(s, 0, 0);
      CHECK(ref.total() == doctest::Approx(1.0).epsilon(1e-12));
      for (uint64_t t : {1, 2, 5, 9, 17, 100, 1000, 4096, 65537, 999999}) {
        Mix m = st.act(s, 0, t);
        for (const auto& [k, p] : ref.items) CHECK(m.prob(k) == p);
      }
    }
  }
}

TEST_CASE("accumulation oracles: witnesses satisfy their inequalities") {
  for (const auto& ex : {cat::markov_summable_example(), cat::markov_divergent_example()}) {
    auto bad = check_oracle(ex.oracle, 100, 20240611);
    for (const auto& b : bad) MESSAGE(b);
    CHECK(bad.empty());
    // f_floor is a lower bound at every time.
    for (int64_t i = 1; i <= 20; ++i)
      for (uint64_t t : {0, 1, 10, 1000}) CHECK(ex.oracle.f_at(i, t) >= ex.oracle.f_floor(i) - 1e-15);
  }
  // A witness oracle lying about its limit is caught.
  auto ex = cat::markov_summable_example();
  ex.oracle.f_limit = [](int64_t) { return 0.0; };
  CHECK_FALSE(check_oracle(ex.oracle, 50, 1).empty());
}
