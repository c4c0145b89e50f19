#include "doctest.h"

#include <random>

#include "cg/catalog.hpp"
#include "cg/solver.hpp"

using namespace cg;
namespace cat = cg::catalog;

namespace {

double row_guarantee(const Matrix& m, const std::vector<double>& row) {
  double g = 1e300;
  for (size_t j = 0; j < m[0].size(); ++j) {
    double v = 0;
    for (size_t i = 0; i < m.size(); ++i) v += row[i] * m[i][j];
    g = std::min(g, v);
  }
  return g;
}

double col_guarantee(const Matrix& m, const std::vector<double>& col) {
  double g = -1e300;
  for (size_t i = 0; i < m.size(); ++i) {
    double v = 0;
    for (size_t j = 0; j < m[0].size(); ++j) v += col[j] * m[i][j];
    g = std::max(g, v);
  }
  return g;
}

Matrix random_matrix(std::mt19937_64& rng, size_t r, size_t c) {
  std::uniform_real_distribution<double> u(0, 1);
  Matrix m(r, std::vector<double>(c));
  for (auto& row : m)
    for (auto& x : row) x = u(rng);
  return m;
}

std::vector<Truncation> schedule(const StateId& start, std::vector<int64_t> radii) {
  std::vector<Truncation> out;
  for (int64_t r : radii) {
    Truncation t;
    t.inside = cat::bm_window(0, r);
    t.policy = BoundaryPolicy::Certified;
    t.radius = r;
    t.starts = {start};
    out.push_back(std::move(t));
  }
  return out;
}

FiniteGame bm_truncated(int64_t R) {
  auto bm = cat::big_match_N();
  std::vector<StateId> window;
  for (int64_t i = 0; i <= R; ++i) window.push_back(cat::c(i));
  window.push_back(cat::lose());
  return truncate(*bm, window, BoundaryPolicy::PessimisticMax);
}

}  // namespace

TEST_CASE("matrix games: fixed values") {
  auto mp = matrix_game_value({{0, 1}, {1, 0}});
  CHECK(mp.value == doctest::Approx(0.5));
  CHECK(mp.row[0] == doctest::Approx(0.5));
  CHECK(mp.col[0] == doctest::Approx(0.5));
  auto dom = matrix_game_value({{1, 1}, {0, 1}});
  CHECK(dom.value == doctest::Approx(1.0));
  CHECK(dom.row[0] == doctest::Approx(1.0));
  CHECK(matrix_game_value({{0.3}}).value == doctest::Approx(0.3));
  // Pure saddle in the second row and column.
  CHECK(matrix_game_value({{1, 0}, {0.5, 0.5}}).value == doctest::Approx(0.5));
}

TEST_CASE("matrix games: 2x2 agrees with a grid oracle") {
  std::mt19937_64 rng(20240611);
  for (int k = 0; k < 200; ++k) {
    auto m = random_matrix(rng, 2, 2);
    double grid = 0;
    for (int g = 0; g <= 2000; ++g) {
      double p = g / 2000.0;
      grid = std::max(grid, row_guarantee(m, {p, 1 - p}));
    }
    CHECK(std::abs(matrix_game_value(m).value - grid) <= 2e-3);
  }
}

TEST_CASE("matrix games: mixes are optimal up to 4x4") {
  std::mt19937_64 rng(20240612);
  for (int k = 0; k < 400; ++k) {
    size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    auto m = random_matrix(rng, r, c);
    auto sol = matrix_game_value(m);
    REQUIRE(sol.row.size() == r);
    REQUIRE(sol.col.size() == c);
    double sr = 0, sc = 0;
    for (double x : sol.row) {
      sr += x;
      CHECK(x >= -1e-12);
    }
    for (double x : sol.col) {
      sc += x;
      CHECK(x >= -1e-12);
    }
    CHECK(sr == doctest::Approx(1.0));
    CHECK(sc == doctest::Approx(1.0));
    CHECK(row_guarantee(m, sol.row) >= sol.value - 1e-9);
    CHECK(col_guarantee(m, sol.col) <= sol.value + 1e-9);

    // Swapping roles: val(M) = 1 - val(1 - M^T).
    Matrix swapped(c, std::vector<double>(r));
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j) swapped[j][i] = 1 - m[i][j];
    CHECK(matrix_game_value(swapped).value == doctest::Approx(1 - sol.value).epsilon(1e-9));
  }
}

TEST_CASE("bounded reach values approach the Big Match value") {
  auto bm = cat::big_match_N();
  auto v = bounded_reach_value(*bm, {cat::c(1), cat::c(0)}, 200);
  CHECK(v.at(cat::c(0)) == 1.0);
  CHECK(v.at(cat::c(1)) <= 0.75 + 1e-9);
  CHECK(std::abs(v.at(cat::c(1)) - 0.75) < 0.02);
  // Monotone in the step budget.
  double prev = 0;
  for (uint64_t n : {1, 2, 4, 8, 16, 32}) {
    double x = bounded_reach_value(*bm, {cat::c(2)}, n).at(cat::c(2));
    CHECK(x >= prev - 1e-12);
    prev = x;
  }
}

TEST_CASE("value bounds bracket (x+2)/(2x+2) at c3") {
  auto bm = cat::big_match_N();
  auto res = value_bounds(*bm, cat::c(3), schedule(cat::c(3), {20, 40, 80, 160}), 0.02);
  CHECK(res.interval.contains(0.625, 1e-12));
  CHECK(res.interval.width() < 0.02);
  CHECK(res.closed);
  CHECK_FALSE(res.steps.empty());
}

TEST_CASE("truncated brackets nest as the window grows") {
  auto bm = cat::big_match_N();
  double prev_lo = 0;
  for (int64_t r : {10, 20, 40}) {
    auto br = truncated_brackets(*bm, schedule(cat::c(3), {r})[0]);
    auto v = br.at(cat::c(3));
    CHECK(v.lo >= prev_lo - 1e-12);
    CHECK(v.contains(0.625, 1e-9));
    prev_lo = v.lo;
  }
}

TEST_CASE("value iteration: monotone from below, ordered from above") {
  auto g = bm_truncated(25);
  ViOptions lo;
  lo.check_monotone = true;
  auto below = value_iteration(g, lo);
  CHECK(below.converged);
  CHECK(below.monotone);
  ViOptions hi;
  hi.from_above = true;
  auto above = value_iteration(g, hi);
  auto upper = upper_via_min_mixes(g, below);
  for (NodeIdx i = 0; i < g.size(); ++i) {
    CHECK(above.value[i] >= below.value[i] - 1e-9);
    CHECK(upper[i] >= below.value[i] - 1e-9);
  }
  auto m = stage_matrix(g, g.at(cat::c(3)), below.value);
  REQUIRE(m.size() == 2);
  CHECK(matrix_game_value(m).value == doctest::Approx(below.value[g.at(cat::c(3))]).epsilon(1e-6));
}

TEST_CASE("fixed mixes are attained against best response") {
  auto g = bm_truncated(25);
  auto vi = value_iteration(g);
  auto att = memoryless_attainment(g, vi.max_mix);
  for (NodeIdx i = 0; i < g.size(); ++i) CHECK(att[i].hi <= vi.value[i] + 1e-6);
  auto fixed = fix_mixes(g, vi.max_mix, Player::Max);
  for (NodeIdx i = 0; i < fixed.size(); ++i) CHECK(fixed.node(i).na == 1);
}

TEST_CASE("acyclic minimizer strategy picks the first successor in budget") {
  // Node 0 is Minimizer's, with successors 1 (value 0.5) and 2 (value 0.3).
  FiniteGame::Builder b("pick");
  for (int k = 0; k < 5; ++k) b.intern(StateId(Tag::C, {k}));
  b.define(0, NodeKind::MinTurn, false, 1, 2, {Cell{Edge{1, 1.0}}, Cell{Edge{2, 1.0}}});
  b.define(1, NodeKind::Random, false, 1, 1, {Cell{Edge{3, 0.5}, Edge{4, 0.5}}});
  b.define(2, NodeKind::Random, false, 1, 1, {Cell{Edge{3, 0.3}, Edge{4, 0.7}}});
  b.absorbing(3, true);
  b.absorbing(4, false);
  auto g = std::move(b).build();
  std::vector<double> val = {0.3, 0.5, 0.3, 1.0, 0.0};
  auto values = [&](const StateId& s) { return val[g.at(s)]; };
  auto tight = acyclic_min_md(g, values, 0.1, [](const StateId&) { return 1; });
  CHECK(tight.act(g.id(0), 0, 0).items.at(0).first == 1);
  // ln 4 at iota 0 lets the bound reach 0.3 (1 + ln 4) > 0.5.
  auto loose = acyclic_min_md(g, values, 3.0, [](const StateId&) { return 0; });
  CHECK(loose.act(g.id(0), 0, 0).items.at(0).first == 0);
  CHECK_THROWS(acyclic_min_md(g, values, 0.0, [](const StateId&) { return 0; }));
  val[0] = 0.1;  // no successor is that low
  CHECK_THROWS(tight.act(g.id(0), 0, 0));
}

TEST_CASE("clock expansion and layering keep bounded values") {
  std::shared_ptr<const Game> bm = cat::big_match_N();
  auto clk = clock_expand(bm);
  auto lay = layer(bm);
  for (int64_t x : {1, 3}) {
    double base = bounded_reach_value(*bm, {cat::c(x)}, 12).at(cat::c(x));
    CHECK(bounded_reach_value(*clk, {clock_id(cat::c(x), 0)}, 12).at(clock_id(cat::c(x), 0)) ==
          doctest::Approx(base).epsilon(1e-12));
    for (int bit : {0, 1})
      CHECK(bounded_reach_value(*lay, {layer_id(cat::c(x), bit)}, 12).at(layer_id(cat::c(x), bit)) ==
            doctest::Approx(base).epsilon(1e-12));
  }
  auto parts = layer_parts(layer_id(cat::c(4), 1));
  REQUIRE(parts);
  CHECK(parts->first == cat::c(4));
  CHECK(parts->second == 1);
  CHECK_FALSE(layer_parts(cat::c(4)));
}

TEST_CASE("clock lift and pullback are inverse on Markov strategies") {
  auto ex = cat::markov_summable_example();
  auto back = clock_pullback(clock_lift(ex.strategy));
  CHECK(back.spec().uses_step_counter);
  auto g = cat::inf_branch_no_markov();
  for (const auto& s : enumerate_states(*g, 100)) {
    if (!Strategy::acts_at(Player::Max, g->kind(s))) continue;
    for (uint64_t t : {0, 1, 7, 300}) {
      auto a = ex.strategy.act(s, 0, t), b = back.act(s, 0, t);
      for (const auto& [k, p] : a.items) CHECK(b.prob(k) == doctest::Approx(p).epsilon(1e-15));
    }
  }
}

TEST_CASE("non-uniform memoryless strategy on a truncated Big Match") {
  auto g = bm_truncated(30);
  std::vector<NodeIdx> starts;
  for (int64_t x = 1; x <= 5; ++x) starts.push_back(g.at(cat::c(x)));
  auto res = non_uniform_memoryless(g, starts, 0.1);
  CHECK(res.ok);
  CHECK(res.horizon > 0);
  CHECK_FALSE(res.region.empty());
  REQUIRE(res.attained.size() == starts.size());
  for (size_t k = 0; k < starts.size(); ++k) CHECK(res.attained[k] >= res.values[k] - 0.1);
}

TEST_CASE("plastering a small layered Big Match keeps its invariants") {
  const int64_t R = 6;
  const double eps = 0.2;
  auto F = std::make_shared<FiniteGame>(bm_truncated(R));
  auto LG = layer(F);
  Truncation lt;
  lt.inside = [](const StateId&) { return true; };
  for (NodeIdx i = 0; i < F->size(); ++i)
    for (int bit : {0, 1}) lt.starts.push_back(layer_id(F->id(i), bit));
  FiniteGame LF = explore(*LG, lt);
  std::vector<StateId> order;
  for (int64_t i = 0; i <= R; ++i) order.push_back(cat::c(i));
  auto ledger = plaster(LF, eps, order);
  for (const auto& v : ledger.invariant_violations) MESSAGE(v);
  CHECK(ledger.ok());
  REQUIRE_FALSE(ledger.rounds.empty());
  double budget = 0;
  for (size_t k = 0; k < ledger.rounds.size(); ++k) {
    budget += ledger.rounds[k].epsilon;
    if (k) CHECK(ledger.rounds[k].epsilon <= ledger.rounds[k - 1].epsilon);
  }
  CHECK(budget <= eps + 1e-12);
  auto sigma = read_back_one_bit(ledger_mix(ledger, LF), "plastered");
  CHECK(sigma.spec().mode_count == 2u);
  CHECK(validate(sigma, *F, 20, 2).ok());
}
