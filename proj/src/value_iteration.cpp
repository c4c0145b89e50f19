#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_set>

#include "cg/kernels.hpp"
#include "cg/solver.hpp"

namespace cg {

namespace {

inline double cell_value(const FiniteGame& g, uint32_t c, const double* v) {
  uint32_t b = g.cell_begin(c), e = g.cell_end(c);
  return kernels::dot_gather(g.edge_p() + b, g.edge_to() + b, v, e - b);
}

// One Bellman update at node i; fills the optimal mixes when requested.
double bellman(const FiniteGame& g, NodeIdx i, const double* v, std::vector<double>* row, std::vector<double>* col) {
  const auto& n = g.node(i);
  if (n.target) return 1.0;
  if (n.na == 1 && n.nb == 1) {
    if (row) *row = {1.0};
    if (col) *col = {1.0};
    return cell_value(g, n.cell0, v);
  }
  if (n.nb == 1 || n.na == 1) {
    bool maxp = n.nb == 1;
    uint32_t cnt = n.na * n.nb, best = 0;
    double bv = cell_value(g, n.cell0, v);
    for (uint32_t c = 1; c < cnt; ++c) {
      double x = cell_value(g, n.cell0 + c, v);
      if (maxp ? x > bv : x < bv) {
        bv = x;
        best = c;
      }
    }
    std::vector<double> pure(cnt, 0.0);
    pure[best] = 1.0;
    if (maxp) {
      if (row) *row = pure;
      if (col) *col = {1.0};
    } else {
      if (row) *row = {1.0};
      if (col) *col = pure;
    }
    return bv;
  }
  Matrix m(n.na, std::vector<double>(n.nb));
  for (uint32_t a = 0; a < n.na; ++a)
    for (uint32_t b = 0; b < n.nb; ++b) m[a][b] = std::clamp(cell_value(g, n.cell0 + a * n.nb + b, v), 0.0, 1.0);
  auto sol = matrix_game_value(m);
  if (row) *row = std::move(sol.row);
  if (col) *col = std::move(sol.col);
  return sol.value;
}

// Guaranteed stage value of a Maximizer mix against the worst column.
double mix_value(const FiniteGame& g, NodeIdx i, const double* v, const std::vector<double>& x) {
  const auto& n = g.node(i);
  double worst = 1.0;
  for (uint32_t b = 0; b < n.nb; ++b) {
    double s = 0;
    for (uint32_t a = 0; a < n.na; ++a)
      if (x[a] > 0) s += x[a] * cell_value(g, n.cell0 + a * n.nb + b, v);
    worst = std::min(worst, s);
  }
  return worst;
}

// Nodes with a path to a target (any choices).
std::vector<char> can_reach(const FiniteGame& g) {
  size_t n = g.size();
  std::vector<std::vector<NodeIdx>> pred(n);
  for (NodeIdx i = 0; i < n; ++i) {
    const auto& nd = g.node(i);
    for (uint32_t c = nd.cell0; c < nd.cell0 + nd.na * nd.nb; ++c)
      for (uint32_t e = g.cell_begin(c); e < g.cell_end(c); ++e) pred[g.edge_to()[e]].push_back(i);
  }
  std::vector<char> in(n, 0);
  std::vector<NodeIdx> work;
  for (NodeIdx i = 0; i < n; ++i)
    if (g.node(i).target) {
      in[i] = 1;
      work.push_back(i);
    }
  while (!work.empty()) {
    NodeIdx j = work.back();
    work.pop_back();
    for (NodeIdx i : pred[j])
      if (!in[i]) {
        in[i] = 1;
        work.push_back(i);
      }
  }
  return in;
}

}  // namespace

Matrix stage_matrix(const FiniteGame& g, NodeIdx i, const std::vector<double>& v) {
  const auto& n = g.node(i);
  Matrix m(n.na, std::vector<double>(n.nb));
  for (uint32_t a = 0; a < n.na; ++a)
    for (uint32_t b = 0; b < n.nb; ++b) m[a][b] = cell_value(g, n.cell0 + a * n.nb + b, v.data());
  return m;
}

ViResult value_iteration(const FiniteGame& g, const ViOptions& opts) {
  size_t n = g.size();
  ViResult r;
  auto reach = can_reach(g);
  r.value.assign(n, 0.0);
  for (NodeIdx i = 0; i < n; ++i) {
    if (g.node(i).target)
      r.value[i] = 1.0;
    else if (opts.from_above && reach[i])
      r.value[i] = 1.0;
  }
  r.sticky_max_mix.assign(n, {});
  std::vector<double> row;
  for (uint64_t it = 0; it < opts.max_iters; ++it) {
    double delta = 0.0;
    for (NodeIdx i = 0; i < n; ++i) {
      if (g.node(i).target || !reach[i]) continue;
      bool track = g.node(i).na > 1;
      double v = bellman(g, i, r.value.data(), track ? &row : nullptr, nullptr);
      if (track) {
        auto& st = r.sticky_max_mix[i];
        if (st.empty() || v > mix_value(g, i, r.value.data(), st) + opts.sticky_margin) st = row;
      }
      double old = r.value[i];
      if (opts.check_monotone && (opts.from_above ? v > old + 1e-12 : v < old - 1e-12)) r.monotone = false;
      delta = std::max(delta, std::abs(v - old));
      r.value[i] = v;
    }
    r.iterations = it + 1;
    if (delta < opts.tol) {
      r.converged = true;
      break;
    }
  }
  r.max_mix.assign(n, {});
  r.min_mix.assign(n, {});
  for (NodeIdx i = 0; i < n; ++i) {
    if (g.node(i).target) continue;
    bellman(g, i, r.value.data(), &r.max_mix[i], &r.min_mix[i]);
    if (r.sticky_max_mix[i].empty()) r.sticky_max_mix[i] = r.max_mix[i];
  }
  return r;
}

FiniteGame fix_mixes(const FiniteGame& g, const std::vector<std::vector<double>>& mix, Player player) {
  FiniteGame::Builder b(g.name() + "|fixed");
  for (NodeIdx i = 0; i < g.size(); ++i) b.intern(g.id(i));
  for (NodeIdx i = 0; i < g.size(); ++i) {
    const auto& n = g.node(i);
    auto cell_of = [&](uint32_t c) {
      Cell out;
      for (uint32_t e = g.cell_begin(c); e < g.cell_end(c); ++e) out.push_back({NodeIdx(g.edge_to()[e]), g.edge_p()[e]});
      return out;
    };
    uint32_t own = player == Player::Max ? n.na : n.nb;
    if (i >= mix.size() || mix[i].empty() || own <= 1 || n.target) {
      std::vector<Cell> cells;
      for (uint32_t c = 0; c < n.na * n.nb; ++c) cells.push_back(cell_of(n.cell0 + c));
      b.define(i, n.kind, n.target, n.na, n.nb, std::move(cells));
      continue;
    }
    const auto& x = mix[i];
    if (x.size() != own) throw std::invalid_argument("fix_mixes: mix size mismatch at " + encode(g.id(i)));
    uint32_t other = player == Player::Max ? n.nb : n.na;
    std::vector<Cell> cells;
    for (uint32_t o = 0; o < other; ++o) {
      Cell acc;
      for (uint32_t k = 0; k < own; ++k) {
        if (x[k] <= 0) continue;
        uint32_t c = player == Player::Max ? n.cell0 + k * n.nb + o : n.cell0 + o * n.nb + k;
        for (uint32_t e = g.cell_begin(c); e < g.cell_end(c); ++e)
          acc.push_back({NodeIdx(g.edge_to()[e]), x[k] * g.edge_p()[e]});
      }
      cells.push_back(std::move(acc));
    }
    NodeKind kind = other > 1 ? (player == Player::Max ? NodeKind::MinTurn : NodeKind::MaxTurn) : NodeKind::Random;
    if (player == Player::Max)
      b.define(i, kind, false, 1, other, std::move(cells));
    else
      b.define(i, kind, false, other, 1, std::move(cells));
  }
  auto out = std::move(b).build();
  out.starts = g.starts;
  out.degenerate = g.degenerate;
  return out;
}

std::vector<ValueInterval> memoryless_attainment(const FiniteGame& g, const std::vector<std::vector<double>>& mix) {
  for (NodeIdx i = 0; i < g.size(); ++i)
    if (g.node(i).na > 1 && !g.node(i).target && (i >= mix.size() || mix[i].empty()))
      throw std::invalid_argument("memoryless_attainment: no mix at " + encode(g.id(i)));
  return best_response_value(fix_mixes(g, mix, Player::Max), Player::Min);
}

std::vector<double> upper_via_min_mixes(const FiniteGame& g, const ViResult& vi) {
  auto mdp = fix_mixes(g, vi.min_mix, Player::Min);
  auto br = best_response_value(mdp, Player::Max);
  std::vector<double> out(g.size());
  for (NodeIdx i = 0; i < g.size(); ++i) out[i] = br[i].hi;
  return out;
}

std::map<StateId, double> bounded_reach_value(const Game& game, const std::vector<StateId>& starts, uint64_t n,
                                              const BoundedOptions& opts) {
  // n-step forward closure.
  std::unordered_set<StateId> seen(starts.begin(), starts.end());
  std::vector<StateId> frontier(starts.begin(), starts.end());
  for (uint64_t d = 0; d < n && !frontier.empty(); ++d) {
    std::vector<StateId> next;
    for (const auto& s : frontier) {
      if (game.is_target(s)) continue;
      NodeKind k = game.kind(s);
      Count ca = game.num_actions(s, Player::Max), cb = game.num_actions(s, Player::Min);
      uint64_t na = ca.value_or(opts.branch_budget), nb = cb.value_or(opts.branch_budget);
      if (k == NodeKind::MaxTurn) nb = 1;
      if (k == NodeKind::MinTurn) na = 1;
      if (k == NodeKind::Random) na = nb = 1;
      for (uint64_t a = 0; a < na; ++a)
        for (uint64_t b = 0; b < nb; ++b)
          game.transition(s, a, b).for_each(
              [&](const StateId& x, double) {
                if (seen.insert(x).second) next.push_back(x);
              },
              opts.tail_budget);
      if (seen.size() > opts.max_states)
        throw std::runtime_error("bounded_reach_value: node budget exceeded at " + encode(s));
    }
    frontier = std::move(next);
  }
  std::vector<StateId> window(seen.begin(), seen.end());
  std::sort(window.begin(), window.end());
  auto fg = truncate(game, window, BoundaryPolicy::PessimisticMax);
  // Exact layered backward induction: Jacobi steps from the target indicator.
  std::vector<double> v(fg.size(), 0.0), w(fg.size());
  for (NodeIdx i = 0; i < fg.size(); ++i) v[i] = fg.node(i).target ? 1.0 : 0.0;
  for (uint64_t step = 0; step < n; ++step) {
    for (NodeIdx i = 0; i < fg.size(); ++i) w[i] = bellman(fg, i, v.data(), nullptr, nullptr);
    std::swap(v, w);
  }
  std::map<StateId, double> out;
  for (const auto& s : starts) out[s] = v[fg.at(s)];
  return out;
}

ValueInterval TruncatedBrackets::at(const StateId& s) const {
  auto l = lower.find(s);
  auto u = upper.find(s);
  double lo = l == lower.end() ? 0.0 : l->second;
  double hi = u == upper.end() ? 1.0 : u->second;
  return {std::min(lo, hi), std::max(lo, hi)};
}

TruncatedBrackets truncated_brackets(const Game& game, const Truncation& t) {
  TruncatedBrackets tb;
  Truncation pt = t;
  pt.policy = BoundaryPolicy::PessimisticMax;
  pt.certificate.reset();
  auto lg = explore(game, pt);
  auto lv = value_iteration(lg);
  for (NodeIdx i = 0; i < lg.size(); ++i) tb.lower[lg.id(i)] = lv.value[i];
  tb.states = lg.size();

  std::vector<std::optional<TailCertificate>> certs;
  if (t.policy == BoundaryPolicy::Certified) {
    if (t.certificate)
      certs.push_back(t.certificate);
    else
      for (auto& c : game.tail_certificates(t.radius)) certs.push_back(c);
  }
  if (certs.empty()) certs.push_back(std::nullopt);
  for (const auto& c : certs) {
    Truncation ut = t;
    ut.policy = c ? BoundaryPolicy::Certified : BoundaryPolicy::OptimisticMax;
    ut.certificate = c;
    auto ug = explore(game, ut);
    auto uv = value_iteration(ug);
    auto up = upper_via_min_mixes(ug, uv);
    for (const auto& s : t.starts) {
      auto idx = ug.find(s);
      if (!idx) continue;
      double u = std::min(1.0, up[*idx]);
      auto it = tb.upper.find(s);
      if (it == tb.upper.end() || u < it->second) {
        tb.upper[s] = u;
        if (c) tb.certificate = c->name;
      }
    }
  }
  return tb;
}

BoundsResult value_bounds(const Game& game, const StateId& start, const std::vector<Truncation>& schedule, double tol) {
  BoundsResult res;
  res.interval = ValueInterval(0.0, 1.0);
  if (game.is_target(start)) {
    res.interval = ValueInterval(1.0, 1.0);
    res.closed = true;
    return res;
  }
  for (const auto& t0 : schedule) {
    Truncation t = t0;
    if (std::find(t.starts.begin(), t.starts.end(), start) == t.starts.end()) t.starts.push_back(start);
    auto tb = truncated_brackets(game, t);
    ValueInterval br = tb.at(start);
    res.steps.push_back({t.radius, br, tb.states, tb.certificate});
    res.interval = res.interval.meet(br, 1e-7);
    if (res.interval.width() < tol) {
      res.closed = true;
      break;
    }
  }
  return res;
}

}  // namespace cg
