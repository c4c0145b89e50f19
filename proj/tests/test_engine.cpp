#include "doctest.h"

#include <random>

#include "cg/catalog.hpp"
#include "cg/engine.hpp"

using namespace cg;
namespace cat = cg::catalog;

namespace {

// Random one-player game on n nodes: node 0 is the target, node n-1 a losing
// sink, the rest are random or owned by `owner` with up to two choices.
FiniteGame random_mdp(std::mt19937_64& rng, Player owner) {
  std::uniform_int_distribution<int> size(3, 6);
  std::uniform_real_distribution<double> u(0, 1);
  int n = size(rng);
  FiniteGame::Builder b("random-mdp");
  for (int k = 0; k < n; ++k) b.intern(StateId(Tag::C, {k}));
  b.absorbing(0, true);
  b.absorbing(NodeIdx(n - 1), false);
  auto cell = [&] {
    Cell c;
    int fan = 1 + int(rng() % 3);
    double total = 0;
    std::vector<double> w(fan);
    for (auto& x : w) total += (x = u(rng) + 0.05);
    for (int f = 0; f < fan; ++f) c.push_back(Edge{NodeIdx(rng() % n), w[f] / total});
    return c;
  };
  for (int k = 1; k < n - 1; ++k) {
    uint32_t choices = 1 + uint32_t(rng() % 2);
    std::vector<Cell> cells;
    for (uint32_t c = 0; c < choices; ++c) cells.push_back(cell());
    if (choices == 1)
      b.define(NodeIdx(k), NodeKind::Random, false, 1, 1, std::move(cells));
    else if (owner == Player::Max)
      b.define(NodeIdx(k), NodeKind::MaxTurn, false, choices, 1, std::move(cells));
    else
      b.define(NodeIdx(k), NodeKind::MinTurn, false, 1, choices, std::move(cells));
  }
  return std::move(b).build();
}

// Optimum over all deterministic memoryless policies.
std::vector<double> brute_force(const FiniteGame& g, Player opt) {
  size_t n = g.size();
  std::vector<uint32_t> count(n), choice(n, 0);
  for (NodeIdx i = 0; i < n; ++i) count[i] = g.node(i).na * g.node(i).nb;
  std::vector<double> best(n, opt == Player::Max ? -1.0 : 2.0);
  while (true) {
    auto v = evaluate_policy(g, choice);
    for (NodeIdx i = 0; i < n; ++i) best[i] = opt == Player::Max ? std::max(best[i], v[i]) : std::min(best[i], v[i]);
    size_t k = 0;
    while (k < n && ++choice[k] == count[k]) choice[k++] = 0;
    if (k == n) break;
  }
  return best;
}

Strategy counting_strategy() {
  MemorySpec un;
  un.mode_count = std::nullopt;
  return Strategy(
      "counter", Player::Max, un, [](const StateId&, Mode, uint64_t) { return Mix::dirac(0); },
      [](const StateId&, const ActionProfile&, Mode m, uint64_t) { return Mix::dirac(m + 1); });
}

}  // namespace

TEST_CASE("sweep: always-stop against always-up reaches the target in one step") {
  auto bm = cat::big_match_N();
  auto r = forward_reach_exact(*bm, cat::mr_from_f(cat::constant_rate(1.0)), cat::min_always(1), cat::c(5), 1);
  CHECK(r.interval.lo == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.interval.hi == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.mass_error < 1e-12);
}

TEST_CASE("sweep: stop rate 1/(k+1)^2 against always-down from c3") {
  // Survive the stops at c3, c2 and c1: (15/16)(8/9)(3/4) = 5/8.
  auto bm = cat::big_match_N();
  auto r = forward_reach_exact(*bm, cat::mr_from_f(cat::inv_square_rate()), cat::min_always(0), cat::c(3), 10);
  CHECK(r.interval.lo == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(r.interval.hi == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("sweep: horizon zero knows nothing") {
  auto bm = cat::big_match_N();
  auto r = forward_reach_exact(*bm, cat::min_fair_coin(), cat::min_fair_coin(), cat::c(2), 0);
  CHECK(r.interval.lo == 0.0);
  CHECK(r.interval.hi == 1.0);
  // Starting in the target is a hit at time 0.
  auto t = forward_reach_exact(*bm, cat::mr_from_f(cat::inv_square_rate()), cat::min_fair_coin(), cat::c(0), 0);
  CHECK(t.interval.lo == 1.0);
}

TEST_CASE("sweep: mass is conserved and brackets tighten with the horizon") {
  auto bm = cat::big_match_N();
  auto tb = cat::tb_big_match_N();
  struct Case {
    const Game* g;
    Strategy s, p;
    StateId start;
  };
  std::vector<Case> cases = {
      {bm.get(), cat::max_bm_strategy(1, 4), cat::min_fair_coin(), cat::c(1)},
      {bm.get(), cat::mr_from_f(cat::constant_rate(0.3)), cat::min_fair_coin(), cat::c(2)},
      {bm.get(), cat::mr_from_f(cat::inv_square_rate()), cat::min_always(1), cat::c(1)},
      {tb.get(), cat::max_bm_strategy(1, 3, cat::Form::TurnBased), cat::min_fair_coin(), cat::c(1)},
  };
  for (auto& c : cases) {
    double prev_lo = 0, prev_hi = 1;
    for (uint64_t h : {1, 2, 5, 10, 20, 40, 80}) {
      auto r = forward_reach_exact(*c.g, c.s, c.p, c.start, h);
      CHECK(r.mass_error < 1e-9);
      CHECK(r.interval.lo >= prev_lo - 1e-12);
      CHECK(r.interval.hi <= prev_hi + 1e-12);
      prev_lo = r.interval.lo;
      prev_hi = r.interval.hi;
    }
  }
}

TEST_CASE("sweep: a mass floor only widens the bracket") {
  auto bm = cat::big_match_N();
  auto sigma = cat::max_bm_strategy(1, 6);
  auto full = forward_reach_exact(*bm, sigma, cat::min_fair_coin(), cat::c(1), 60);
  auto cut = forward_reach_exact(*bm, sigma, cat::min_fair_coin(), cat::c(1), 60, 1e-6);
  CHECK(cut.interval.lo <= full.interval.lo + 1e-12);
  CHECK(cut.interval.hi >= full.interval.hi - 1e-12);
  CHECK(cut.pruned_mass >= 0.0);
  CHECK_THROWS(forward_reach_exact(*bm, sigma, cat::min_fair_coin(), cat::c(1), 60, -0.5));
}

TEST_CASE("sweep and induce reject unbounded memory unless allowed") {
  auto bm = cat::big_match_N();
  auto st = counting_strategy();
  CHECK_THROWS(forward_reach_exact(*bm, st, cat::min_fair_coin(), cat::c(2), 5));
  SweepOptions o;
  o.allow_unbounded_memory = true;
  auto r = forward_reach_exact(*bm, st, cat::min_fair_coin(), cat::c(2), 5, o);
  CHECK(r.interval.lo <= r.interval.hi);
  Truncation t;
  t.inside = cat::bm_window(0, 10);
  t.starts = {cat::c(2)};
  CHECK_THROWS(induce_mdp(*bm, st, t));
}

TEST_CASE("monte carlo: deterministic and thread independent") {
  auto bm = cat::big_match_N();
  auto sigma = cat::max_bm_strategy(1, 4);
  auto a = simulate_mc(*bm, sigma, cat::min_fair_coin(), cat::c(1), 60, 4000, 20240611);
  auto b = simulate_mc(*bm, sigma, cat::min_fair_coin(), cat::c(1), 60, 4000, 20240611);
  CHECK(a.absorbed == b.absorbed);
  CHECK(a.interval.lo == b.interval.lo);
  McOptions one, four;
  one.threads = 1;
  four.threads = 4;
  auto c = simulate_mc(*bm, sigma, cat::min_fair_coin(), cat::c(1), 60, 4000, 20240611, 0.99, one);
  auto d = simulate_mc(*bm, sigma, cat::min_fair_coin(), cat::c(1), 60, 4000, 20240611, 0.99, four);
  CHECK(c.absorbed == d.absorbed);
  CHECK(c.absorbed == a.absorbed);
  CHECK(episode_seed(1, 2) != episode_seed(1, 3));
  CHECK(episode_seed(1, 2) == episode_seed(1, 2));
}

TEST_CASE("monte carlo: a forced win hits every time") {
  auto bm = cat::big_match_N();
  auto r = simulate_mc(*bm, cat::mr_from_f(cat::constant_rate(1.0)), cat::min_always(1), cat::c(5), 3, 500, 7);
  CHECK(r.absorbed == 1.0);
  CHECK(r.interval.hi == 1.0);
  CHECK(r.method == EstimateMethod::MonteCarlo);
}

TEST_CASE("monte carlo intervals meet exact brackets") {
  auto bm = cat::big_match_N();
  auto tb = cat::tb_big_match_N();
  int pair = 0;
  for (int64_t start : {1, 2, 3}) {
    for (double rate : {0.2, 0.5}) {
      auto s = cat::mr_from_f(cat::constant_rate(rate));
      auto ex = forward_reach_exact(*bm, s, cat::min_fair_coin(), cat::c(start), 40);
      auto mc = simulate_mc(*bm, s, cat::min_fair_coin(), cat::c(start), 40, 20000, 20240612 + pair++);
      CHECK_NOTHROW((void)ex.interval.meet(mc.interval, 0.0));
    }
    auto s = cat::max_bm_strategy(start, 3, cat::Form::TurnBased);
    auto ex = forward_reach_exact(*tb, s, cat::min_fair_coin(), cat::c(start), 60);
    auto mc = simulate_mc(*tb, s, cat::min_fair_coin(), cat::c(start), 60, 20000, 20240612 + pair++);
    CHECK_NOTHROW((void)ex.interval.meet(mc.interval, 0.0));
  }
}

TEST_CASE("induced mdp: fixing Maximizer leaves Minimizer's choices") {
  auto bm = cat::big_match_N();
  Truncation t;
  t.inside = cat::bm_window(0, 12);
  t.starts = {cat::c(3)};
  auto mdp = induce_mdp(*bm, cat::mr_from_f(cat::constant_rate(0.5)), t);
  bool min_choice = false;
  for (NodeIdx i = 0; i < mdp.size(); ++i) {
    CHECK(mdp.node(i).na == 1);
    if (mdp.node(i).nb > 1) min_choice = true;
  }
  CHECK(min_choice);
  auto br = best_response_value(mdp, Player::Min);
  ValueInterval v = br.at(mdp.starts.at(0));
  CHECK(v.width() < 1e-6);
  // The stop rate is constant, so Minimizer only has to outwait it.
  CHECK(v.hi <= 1.0 / (1.0 + 0.5 * 3) + 1e-9);
}

TEST_CASE("induced mdp: one bit of memory at most doubles the nodes") {
  auto tb = cat::tb_big_match_N();
  Truncation t;
  t.inside = cat::tb_window(8, 8);
  t.starts = {cat::c(2)};
  auto one = induce_mdp(*tb, cat::min_fair_coin(), t);
  MemorySpec bit;
  bit.mode_count = 2;
  auto toggler = Strategy(
      "toggle", Player::Min, bit, [](const StateId&, Mode m, uint64_t) { return Mix::dirac(m); },
      [](const StateId&, const ActionProfile&, Mode m, uint64_t) { return Mix::dirac(1 - m); });
  auto two = induce_mdp(*tb, toggler, t);
  CHECK(two.size() <= 2 * one.size() + 2);
  CHECK(two.size() > one.size());
}

TEST_CASE("best response agrees with policy enumeration on tiny games") {
  std::mt19937_64 rng(20240614);
  for (int k = 0; k < 300; ++k) {
    Player opt = k % 2 ? Player::Max : Player::Min;
    auto g = random_mdp(rng, opt);
    auto br = best_response_value(g, opt);
    auto bf = brute_force(g, opt);
    for (NodeIdx i = 0; i < g.size(); ++i) {
      CHECK(br[i].lo <= bf[i] + 1e-6);
      CHECK(br[i].hi >= bf[i] - 1e-6);
      CHECK(br[i].width() <= 1e-6);
    }
  }
}

TEST_CASE("best response rejects the wrong owner") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    auto g = random_mdp(rng, Player::Max);
    bool has_choice = false;
    for (NodeIdx i = 0; i < g.size(); ++i) has_choice |= g.node(i).na > 1;
    if (!has_choice) continue;
    CHECK_THROWS(best_response_value(g, Player::Min));
    return;
  }
}
