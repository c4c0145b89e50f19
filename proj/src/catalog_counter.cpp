#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <unordered_map>

#include "catalog_internal.hpp"

namespace cg::catalog {

using namespace detail;

MrCounter min_vs_mr(const Strategy& sigma, uint64_t n_check) {
  if (!sigma.rate_certificate) throw std::invalid_argument("min_vs_mr: strategy carries no rate certificate");
  const SequenceOracle cert = *sigma.rate_certificate;
  if (cert.first == 0) throw std::invalid_argument("min_vs_mr: certificate must start at index 1");
  MrCounter out;
  out.sum_class = product_positive(cert, n_check);
  switch (out.sum_class) {
    case ProductClass::ConvergesPositive:
      // Minimizer pushes up; Maximizer wins only by stopping at some c_k, k >= x.
      out.strategy = min_always(1);
      out.bound = [cert](int64_t x) { return std::min(1.0, cert.tail_sum(uint64_t(std::max<int64_t>(x, 1)))); };
      break;
    case ProductClass::DivergesToZero:
      // Minimizer pushes down; reaching c_0 needs no stop at c_1..c_x.
      out.strategy = min_always(0);
      out.bound = [cert](int64_t x) { return 1.0 / (1.0 + std::max(0.0, cert.partial_lower(uint64_t(x) + 1))); };
      break;
    case ProductClass::Undecided: throw std::invalid_argument("min_vs_mr: certificate undecided");
  }
  return out;
}

namespace {

// Smallest n >= 1 with pred(n) by doubling and bisection; pred monotone.
template <class Pred>
int64_t first_index(Pred pred, int64_t cap = int64_t(1) << 62) {
  int64_t lo = 0, hi = 1;
  while (!pred(hi)) {
    lo = hi;
    if (hi >= cap / 2) return cap;
    hi *= 2;
  }
  while (hi - lo > 1) {
    int64_t mid = lo + (hi - lo) / 2;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

MarkovCounter min_vs_markov(const AccumulationOracle& o, SumClass cls, double eps) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("min_vs_markov: eps outside (0,1)");
  const SequenceOracle& ls = o.limit_series;
  ProductClass pc = product_positive(ls, 200);
  if (cls == SumClass::Summable && (pc != ProductClass::ConvergesPositive || !ls.tail_sum))
    throw std::invalid_argument("min_vs_markov: summable case needs a tail-sum certificate");
  if (cls == SumClass::Divergent && (pc != ProductClass::DivergesToZero || !ls.partial_lower))
    throw std::invalid_argument("min_vs_markov: divergent case needs a partial-sum certificate");
  if (!o.witness_le || !o.witness_ge) throw std::invalid_argument("min_vs_markov: oracle without witnesses");

  MarkovCounter mc;
  mc.cycle_eps = [eps](uint64_t c) { return std::ldexp(eps, -int(std::min<uint64_t>(c, 1000))); };
  auto cyc = mc.cycle_eps;
  auto memo = std::make_shared<std::pair<std::mutex, std::map<uint64_t, int64_t>>>();
  mc.entry = [cls, ls, cyc, memo](uint64_t c) {
    {
      std::lock_guard<std::mutex> lk(memo->first);
      if (auto it = memo->second.find(c); it != memo->second.end()) return it->second;
    }
    double e = cyc(c);
    int64_t i0;
    if (cls == SumClass::Summable) {
      i0 = first_index([&](int64_t n) { return ls.tail_sum(uint64_t(n)) <= e / 2; });
    } else {
      // sum_{1 <= i <= n} f(i) >= partial_lower(n + 1).
      i0 = first_index([&](int64_t n) { return ls.partial_lower(uint64_t(n) + 1) >= 1.0 / e; });
    }
    std::lock_guard<std::mutex> lk(memo->first);
    memo->second[c] = i0;
    return i0;
  };

  auto entry = mc.entry;
  auto wle = o.witness_le, wge = o.witness_ge;
  MemorySpec spec;
  spec.mode_count = std::nullopt;
  spec.uses_step_counter = true;  // delays are timed against the clock
  mc.strategy = Strategy(
      std::string("min-vs-markov(") + (cls == SumClass::Summable ? "summable" : "divergent") + ")", Player::Min, spec,
      [=](const StateId& s, Mode m, uint64_t t) {
        switch (s.tag) {
          case Tag::U: return Mix::dirac(uint64_t(entry(m + 1)));
          case Tag::B: {
            int64_t i = s.p(0);
            if (i == 0) return Mix::dirac(0);
            uint64_t c = std::max<Mode>(m, 1);
            double slack = std::max(std::ldexp(1.0, -int(std::min<int64_t>(i, 1000))), 1e-300);
            uint64_t ts = cls == SumClass::Summable ? wle(i, slack * cyc(c) / 2, t + 2) : wge(i, slack, t + 2);
            // Arrival at c_i happens at t + 1 + j.
            return Mix::dirac(ts - t - 2);
          }
          case Tag::D: return Mix::dirac(cls == SumClass::Summable ? 1 : 0);
          default: return Mix::dirac(0);
        }
      },
      [](const StateId& s, const ActionProfile&, Mode m, uint64_t) { return Mix::dirac(s.tag == Tag::U ? m + 1 : m); },
      true);
  return mc;
}

// ---- almost-surely winning strategy ----

namespace {

struct Horizons {
  std::mutex mu;
  std::map<std::tuple<int64_t, int64_t, double>, uint64_t> table;
};
Horizons& horizons() {
  static Horizons h;
  return h;
}

// Bounded-horizon reach under max_bm(x, N) against Minimizer's best bounded
// response, on the induced MDP of the turn-based game.
uint64_t compute_horizon(int64_t x, const AsWinningInfo& info) {
  auto g = tb_big_match_N();
  auto sigma = max_bm_strategy(x, info.inner_N, Form::TurnBased);
  int64_t top = x + info.inner_N;
  Truncation t;
  t.inside = tb_window(top, (top + 2) * (top + 2));
  t.policy = BoundaryPolicy::PessimisticMax;
  t.starts = {c(x)};
  auto mdp = induce_mdp(*g, sigma, t);
  NodeIdx start = mdp.starts.at(0);
  std::vector<double> v(mdp.size()), w(mdp.size());
  for (NodeIdx i = 0; i < mdp.size(); ++i) v[i] = mdp.node(i).target ? 1.0 : 0.0;
  for (uint64_t h = 0; h <= info.max_horizon; ++h) {
    if (v[start] >= info.level) return h;
    for (NodeIdx i = 0; i < mdp.size(); ++i) {
      const auto& nd = mdp.node(i);
      if (nd.target) {
        w[i] = 1;
        continue;
      }
      double best = 1e300;
      for (uint32_t cidx = nd.cell0; cidx < nd.cell0 + nd.na * nd.nb; ++cidx) {
        double s = 0;
        for (uint32_t e = mdp.cell_begin(cidx); e < mdp.cell_end(cidx); ++e) s += mdp.edge_p()[e] * v[mdp.edge_to()[e]];
        best = std::min(best, s);
      }
      w[i] = best == 1e300 ? 0.0 : best;
    }
    std::swap(v, w);
  }
  throw std::runtime_error("as_winning_horizon: budget exhausted for x = " + std::to_string(x));
}

enum Phase : uint8_t { Risky = 0, AtU = 1, Play = 2 };

struct Frame {
  uint8_t phase = Risky;
  int64_t x = 0;
  uint64_t steps = 0;
  friend bool operator==(const Frame& a, const Frame& b) {
    return a.phase == b.phase && a.x == b.x && a.steps == b.steps;
  }
};

struct StackHash {
  size_t operator()(const std::vector<Frame>& v) const noexcept {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& f : v) {
      h ^= uint64_t(f.phase) + 0x9e37 + (h << 6) + (h >> 2);
      h ^= uint64_t(f.x) + 0x7f4a + (h << 6) + (h >> 2);
      h ^= f.steps + 0xc15 + (h << 6) + (h >> 2);
    }
    return size_t(h);
  }
};

// Memory stacks (one frame per copy depth) are interned; the mode is the id.
struct Interner {
  std::mutex mu;
  std::vector<std::vector<Frame>> stacks{{}};
  std::unordered_map<std::vector<Frame>, Mode, StackHash> ids{{{}, 0}};

  Mode id(const std::vector<Frame>& s) {
    std::lock_guard<std::mutex> lk(mu);
    auto [it, fresh] = ids.emplace(s, stacks.size());
    if (fresh) stacks.push_back(s);
    return it->second;
  }
  // Modes never issued read as the empty stack, which keeps the rule total.
  std::vector<Frame> get(Mode m) {
    std::lock_guard<std::mutex> lk(mu);
    return m < stacks.size() ? stacks[m] : std::vector<Frame>{};
  }
};

bool delay_state(const StateId& s) {
  return s.tag == Tag::B || s.tag == Tag::Bij || s.tag == Tag::Bijl || s.tag == Tag::Lose;
}

}  // namespace

uint64_t as_winning_horizon(int64_t x, const AsWinningInfo& info) {
  auto key = std::make_tuple(x, info.inner_N, info.level);
  auto& h = horizons();
  {
    std::lock_guard<std::mutex> lk(h.mu);
    if (auto it = h.table.find(key); it != h.table.end()) return it->second;
  }
  uint64_t v = compute_horizon(x, info);
  std::lock_guard<std::mutex> lk(h.mu);
  h.table.emplace(key, v);
  return v;
}

Strategy max_as_winning(GamePtr game, const AsWinningInfo& info) {
  const std::string nm = game->name();
  const bool comb = nm == "combined";
  if (!(comb || nm == "inf_branch_no_mr" || nm == "inf_branch_no_markov" || nm.rfind("nested(", 0) == 0))
    throw std::invalid_argument("max_as_winning: not an infinitely branching Big Match game: " + nm);
  auto tab = std::make_shared<Interner>();
  // Frame depth of a state: its copy depth below G_k's root.
  auto depth = [comb](const StateId& s) -> int {
    if (comb) return (s.tag == Tag::S0 || s.tag == Tag::F) ? -1 : int(s.nest.size()) - 1;
    return int(s.nest.size());
  };
  const int64_t N = info.inner_N;
  MemorySpec spec;
  spec.mode_count = std::nullopt;
  auto act = [tab, depth, N](const StateId& s, Mode m, uint64_t) {
    if (s.tag != Tag::Cij) return Mix::dirac(0);
    auto st = tab->get(m);
    int d = depth(s);
    if (d < 0 || size_t(d) >= st.size() || st[d].phase != Play) return Mix::dirac(0);
    int64_t n = st[d].x + N - s.p(0);
    int64_t len = n < 0 ? 1 : (n + 1) * (n + 1);
    return Mix::dirac(s.p(1) < len ? 1 : 0);
  };
  auto update = [tab, depth, info](const StateId& s, const ActionProfile& ap, Mode m, uint64_t) {
    auto st = tab->get(m);
    int ds = depth(s), dn = depth(*ap.next);
    if (ds >= 0) {
      if (st.size() < size_t(ds) + 1) st.resize(ds + 1);
      Frame& f = st[ds];
      if (s.tag == Tag::U) {
        f = Frame{AtU, 0, 0};
      } else if (f.phase == AtU && s.tag == Tag::C && s.p(0) >= 1) {
        f = Frame{Play, s.p(0), 1};
      } else if (f.phase == Play && !delay_state(s)) {
        if (++f.steps >= as_winning_horizon(f.x, info)) f = Frame{Risky, 0, 0};
      }
    }
    // Entering a copy starts a fresh frame; leaving one drops it.
    if (dn < 0) {
      st.clear();
    } else if (size_t(dn) + 1 < st.size()) {
      st.resize(dn + 1);
    } else {
      while (st.size() < size_t(dn) + 1) st.push_back(Frame{});
    }
    return Mix::dirac(tab->id(st));
  };
  Strategy out("max-as-winning", Player::Max, spec, act, update, true);
  return out;
}

}  // namespace cg::catalog
