#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "cg/catalog.hpp"
#include "cg/harness.hpp"
#include "cg/solver.hpp"

namespace cg::harness {

namespace {

namespace cat = cg::catalog;

std::string s(int64_t v) { return std::to_string(v); }

double ms_since(std::chrono::steady_clock::time_point& t) {
  auto now = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(now - t).count();
  t = now;
  return ms;
}

std::vector<ResultRow> tb_attain(const ParamMap& p) {
  auto game = cat::tb_big_match_N();
  const double slack = get_double(p, "slack");
  std::vector<ResultRow> rows;
  auto t0 = std::chrono::steady_clock::now();
  for (int64_t N : get_int_list(p, "N"))
    for (int64_t x : get_int_list(p, "x")) {
      auto sigma = cat::max_bm_strategy(x, N, cat::Form::TurnBased);
      const int64_t top = x + N;
      Truncation t;
      t.inside = cat::tb_window(top, (top + 1) * (top + 1));
      t.policy = BoundaryPolicy::PessimisticMax;
      t.starts = {cat::c(x)};
      auto mdp = induce_mdp(*game, sigma, t);
      auto br = best_response_value(mdp, Player::Min);
      ValueInterval v = br.at(mdp.starts.at(0));
      double expected = double(N) / double(2 * N + 2);
      auto row = make_row("TB-ATTAIN",
                          json_params({{"N", s(N)}, {"x", s(x)}, {"states", s(int64_t(mdp.size()))}, {"slack", fmt(slack)}}),
                          v.lo, v.hi, expected, "PAPER", "lo >= expected - slack", v.lo >= expected - slack);
      row.runtime_ms = ms_since(t0);
      rows.push_back(row);
    }
  return rows;
}

// ---- almost-sure winning on the no-MR game ----

Strategy nomr_minimizer(const std::string& entry_kind, const std::string& d_kind, int64_t emin, int64_t emax) {
  Mix at_u;
  if (entry_kind == "uniform") {
    for (int64_t x = emin; x <= emax; ++x) at_u.add(uint64_t(x), 1.0 / double(emax - emin + 1));
  } else if (entry_kind == "low") {
    at_u = Mix::dirac(uint64_t(emin));
  } else {
    at_u = Mix::dirac(uint64_t(emax));
  }
  Mix at_d = d_kind == "coin" ? Mix::bernoulli(0, 1, 0.5) : Mix::dirac(d_kind == "down" ? 0 : 1);
  return Strategy::memoryless("min(" + entry_kind + "," + d_kind + ")", Player::Min, [at_u, at_d](const StateId& st) {
    if (st.tag == Tag::U) return at_u;
    if (st.tag == Tag::D) return at_d;
    return Mix::dirac(0);
  });
}

std::vector<ResultRow> nomr_as(const ParamMap& p) {
  auto game = cat::inf_branch_no_mr();
  const uint64_t episodes = uint64_t(get_int(p, "episodes")), seed = get_seed(p, "seed");
  const int64_t cycles = get_int(p, "cycles");
  const double threshold = get_double(p, "threshold"), halfwidth = get_double(p, "halfwidth");
  auto entries = get_int_list(p, "entries");
  const int64_t emin = *std::min_element(entries.begin(), entries.end());
  const int64_t emax = *std::max_element(entries.begin(), entries.end());
  if (emin < 1) throw std::invalid_argument("NOMR-AS: entries must be >= 1");
  cat::AsWinningInfo info;
  auto sigma = cat::max_as_winning(game, info);
  uint64_t hmax = 0;
  for (int64_t x = emin; x <= emax; ++x) hmax = std::max(hmax, cat::as_winning_horizon(x, info));
  // One u-cycle: the entry step, h_x counted steps, then at most one further
  // row (chain of length one) before the play wins or returns to u.
  const uint64_t cycle_len = hmax + 8;
  const uint64_t horizon = uint64_t(cycles) * cycle_len;

  std::vector<ResultRow> rows;
  auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::string>> family = {
      {"uniform", "coin"}, {"uniform", "down"}, {"uniform", "up"}, {"low", "down"}, {"high", "up"}};
  uint64_t k = 0;
  for (const auto& [ek, dk] : family) {
    auto pi = nomr_minimizer(ek, dk, emin, emax);
    auto est = simulate_mc(*game, sigma, pi, cat::u(), horizon, episodes, seed + k++);
    double hw = est.interval.width() / 2;
    auto row = make_row("NOMR-AS",
                        json_params({{"pi", pi.name()}, {"cycles", s(cycles)}, {"horizon", s(int64_t(horizon))},
                                     {"episodes", s(int64_t(episodes))}, {"seed", s(int64_t(est.seed))},
                                     {"estimate", fmt(est.absorbed)}}),
                        est.interval.lo, est.interval.hi, threshold, "PAPER",
                        "CI lower end >= threshold and CI half-width <= halfwidth",
                        est.interval.lo >= threshold && hw <= halfwidth);
    row.runtime_ms = ms_since(t0);
    rows.push_back(row);
  }
  return rows;
}

// ---- memoryless and Markov strategies held to eps from u ----

// Minimizer counting visits to u (the mode) and entering row entry(c) on the
// c-th visit; `d_action` at every d state.
Strategy cycle_counter(std::function<int64_t(uint64_t)> entry, uint64_t d_action, const std::string& name) {
  MemorySpec spec;
  spec.mode_count = std::nullopt;
  return Strategy(
      name, Player::Min, spec,
      [entry, d_action](const StateId& st, Mode m, uint64_t) {
        if (st.tag == Tag::U) return Mix::dirac(uint64_t(entry(m + 1)));
        if (st.tag == Tag::D) return Mix::dirac(d_action);
        return Mix::dirac(0);
      },
      [](const StateId& st, const ActionProfile&, Mode m, uint64_t) { return Mix::dirac(st.tag == Tag::U ? m + 1 : m); },
      true);
}

int64_t first_n(const std::function<bool(int64_t)>& pred) {
  for (int64_t n = 1; n < (int64_t(1) << 40); n *= 2)
    if (pred(n)) {
      int64_t lo = n / 2, hi = n;
      while (hi - lo > 1) {
        int64_t mid = lo + (hi - lo) / 2;
        (pred(mid) ? hi : lo) = mid;
      }
      return hi;
    }
  throw std::runtime_error("first_n: no index found");
}

std::vector<ResultRow> nomr_decay(const ParamMap& p) {
  auto game = cat::inf_branch_no_mr();
  const double eps = get_double(p, "eps");
  auto cyc = [eps](uint64_t c) { return std::ldexp(eps, -int(std::min<uint64_t>(c, 1000))); };
  std::vector<ResultRow> rows;
  auto t0 = std::chrono::steady_clock::now();

  {
    // Summable rate: enter high and always move up; only stops at visited rows can win.
    auto rate = cat::inv_square_rate();
    auto cert = rate.certificate;
    auto sigma = cat::mr_hazard(rate, [](int64_t i) { return (i + 2) * (i + 2); });
    auto entry = [cert, cyc](uint64_t c) { return first_n([&](int64_t n) { return cert.tail_sum(uint64_t(n)) <= cyc(c); }); };
    auto pi = cycle_counter(entry, 1, "min-cycles(up)");
    const int64_t i1 = entry(1), far = i1 + 20;
    SweepOptions so;
    so.allow_unbounded_memory = true;
    so.retire = [cert, far](const WeightedConfig& w) -> std::optional<ValueInterval> {
      if (w.state.tag == Tag::C && w.state.p(0) >= far) return ValueInterval(0, cert.tail_sum(uint64_t(w.state.p(0))));
      return std::nullopt;
    };
    so.alive_bound = [cert](const WeightedConfig& w) {
      if (w.state.tag == Tag::U) return ValueInterval(0, 1);
      int64_t i = w.state.params.empty() ? 1 : std::max<int64_t>(w.state.p(0), 1);
      return ValueInterval(0, std::min(1.0, cert.tail_sum(uint64_t(i))));
    };
    auto est = forward_reach_exact(*game, sigma, pi, cat::u(), 200000, so);
    auto row = make_row("NOMR-DECAY",
                        json_params({{"f", rate.name}, {"J", "(i+2)^2"}, {"entry", s(i1)}, {"retire_row", s(far)}}),
                        est.interval.lo, est.interval.hi, eps, "PAPER", "hi <= eps", est.interval.hi <= eps);
    row.runtime_ms = ms_since(t0);
    rows.push_back(row);
  }
  {
    // Constant rate: enter so that 1/(1 + 0.3 i) <= eps_c and always move down.
    auto rate = cat::constant_rate(0.3);
    auto cert = rate.certificate;
    auto sigma = cat::mr_hazard(rate, [](int64_t) { return 10; });
    auto entry = [cert, cyc](uint64_t c) {
      return first_n([&](int64_t n) { return 1.0 / (1.0 + cert.partial_lower(uint64_t(n) + 1)) <= cyc(c); });
    };
    auto pi = cycle_counter(entry, 0, "min-cycles(down)");
    const uint64_t sweep_cycles = 3;
    SweepOptions so;
    so.allow_unbounded_memory = true;
    // Later cycles: cycle c wins with probability at most prod (1 - f) <= 1/(1 + S) <= eps_c.
    so.retire = [cyc, sweep_cycles](const WeightedConfig& w) -> std::optional<ValueInterval> {
      if (w.state.tag != Tag::U || w.min_mode < sweep_cycles) return std::nullopt;
      double rest = 0;
      for (uint64_t c = w.min_mode + 1; c <= w.min_mode + 60; ++c) rest += cyc(c);
      rest += cyc(w.min_mode + 60);
      return ValueInterval(0, std::min(1.0, rest));
    };
    auto est = forward_reach_exact(*game, sigma, pi, cat::u(), 400000, so);
    auto row = make_row("NOMR-DECAY",
                        json_params({{"f", rate.name}, {"J", "10"}, {"entry", s(entry(1))}, {"swept_cycles", s(int64_t(sweep_cycles))}}),
                        est.interval.lo, est.interval.hi, eps, "PAPER", "hi <= eps", est.interval.hi <= eps);
    row.runtime_ms = ms_since(t0);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ResultRow> nomarkov(const ParamMap& p) {
  auto game = cat::inf_branch_no_markov();
  const double eps = get_double(p, "eps");
  std::vector<ResultRow> rows;
  auto t0 = std::chrono::steady_clock::now();

  {
    auto ex = cat::markov_summable_example();
    auto mc = cat::min_vs_markov(ex.oracle, cat::SumClass::Summable, eps);
    const int64_t i1 = mc.entry(1);
    auto tail = ex.oracle.limit_series.tail_sum;
    auto cyc = mc.cycle_eps;
    // From c_i onwards the play only climbs; at each row the arrival time was
    // picked so that f(i,t) <= f(i) + 2^{-i} eps_1 / 2.
    auto bound = [tail, cyc](int64_t i) {
      return std::min(1.0, tail(uint64_t(i)) + cyc(1) * std::ldexp(1.0, -int(std::min<int64_t>(i, 1000))));
    };
    auto climbing = [i1, bound](const WeightedConfig& w) -> std::optional<ValueInterval> {
      if (w.state.tag == Tag::C && w.state.p(0) >= i1 && w.min_mode == 1) return ValueInterval(0, bound(w.state.p(0)));
      return std::nullopt;
    };
    SweepOptions so;
    so.allow_unbounded_memory = true;
    so.retire = climbing;
    // Waits at the b rows run far past any step horizon.
    so.alive_bound = [climbing](const WeightedConfig& w) { return climbing(w).value_or(ValueInterval(0, 1)); };
    // Forced waits are skipped in one jump, so the step horizon costs nothing.
    auto est = forward_reach_exact(*game, ex.strategy, mc.strategy, cat::u(), uint64_t(1) << 50, so);
    auto row = make_row("NOMARKOV",
                        json_params({{"sigma", ex.strategy.name()}, {"entry", s(i1)}}),
                        est.interval.lo, est.interval.hi, eps, "PAPER", "hi <= eps", est.interval.hi <= eps);
    row.runtime_ms = ms_since(t0);
    rows.push_back(row);
  }
  {
    auto ex = cat::markov_divergent_example();
    auto mc = cat::min_vs_markov(ex.oracle, cat::SumClass::Divergent, eps);
    auto floor = ex.oracle.f_floor;
    // Every descent passes c_1, where the stopping hazard is at least f_floor(1).
    const double pass_c1 = 1.0 - floor(1);
    SweepOptions so;
    so.allow_unbounded_memory = true;
    so.retire = [pass_c1](const WeightedConfig& w) -> std::optional<ValueInterval> {
      if (pass_c1 == 0.0 && w.state.tag == Tag::C && w.state.p(0) >= 1) return ValueInterval(0, 0);
      return std::nullopt;
    };
    auto est = forward_reach_exact(*game, ex.strategy, mc.strategy, cat::u(), 1000, so);
    auto row = make_row("NOMARKOV",
                        json_params({{"sigma", ex.strategy.name()}, {"entry", s(mc.entry(1))}, {"pass_c1", fmt(pass_c1)}}),
                        est.interval.lo, est.interval.hi, eps, "PAPER", "hi <= eps", est.interval.hi <= eps);
    row.runtime_ms = ms_since(t0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

namespace detail {

void register_branching(std::map<std::string, Experiment>& out) {
  out["TB-ATTAIN"] = tb_attain;
  out["NOMR-AS"] = nomr_as;
  out["NOMR-DECAY"] = nomr_decay;
  out["NOMARKOV"] = nomarkov;
}

}  // namespace detail

}  // namespace cg::harness
