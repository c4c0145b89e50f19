#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cg/engine.hpp"
#include "cg/kernels.hpp"

namespace cg {

StateId product_id(const StateId& base, Mode m, std::optional<uint64_t> t) {
  if (t) return wrap(Tag::Product, base, {int64_t(m), int64_t(*t)});
  return wrap(Tag::Product, base, {int64_t(m)});
}

std::optional<ProductParts> product_parts(const StateId& s) {
  if (s.tag != Tag::Product) return std::nullopt;
  auto u = unwrap(s);
  if (!u || u->second.empty() || u->second.size() > 2) return std::nullopt;
  ProductParts out{u->first, Mode(u->second[0]), std::nullopt};
  if (u->second.size() == 2) out.time = uint64_t(u->second[1]);
  return out;
}

namespace {

// Lazy product of a game with the memory (and clock) of a fixed strategy. Only
// the opponent keeps choices.
class ProductGame final : public Game {
 public:
  ProductGame(const Game& g, const Strategy& fixed, bool timed) : g_(g), f_(fixed), timed_(timed) {}

  std::string name() const override { return g_.name() + "x" + f_.name(); }

  NodeKind kind(const StateId& s) const override {
    auto p = parts(s);
    NodeKind k = g_.kind(p.base);
    if (!Strategy::acts_at(f_.owner(), k)) return k;
    if (k == NodeKind::Concurrent) return f_.owner() == Player::Max ? NodeKind::MinTurn : NodeKind::MaxTurn;
    return NodeKind::Random;
  }

  bool is_target(const StateId& s) const override { return g_.is_target(parts(s).base); }

  Count num_actions(const StateId& s, Player p) const override {
    auto pp = parts(s);
    NodeKind k = g_.kind(pp.base);
    if (p == f_.owner()) return uint64_t(1);
    if (k == NodeKind::Concurrent) return g_.num_actions(pp.base, p);
    if (Strategy::acts_at(f_.owner(), k)) return uint64_t(1);
    return g_.num_actions(pp.base, p);
  }

  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    auto pp = parts(s);
    const StateId& base = pp.base;
    NodeKind k = g_.kind(base);
    uint64_t t = pp.time.value_or(0);
    std::optional<uint64_t> nt;
    if (timed_) nt = t + 1;
    uint64_t opp = f_.owner() == Player::Max ? b : a;
    Mix mix = Strategy::acts_at(f_.owner(), k) ? f_.act(base, pp.mode, t) : Mix::dirac(0);
    boost::container::small_vector<Dist<StateId>::Item, 2> out;
    for (const auto& [x, px] : mix.items) {
      uint64_t ax, bx;
      if (k == NodeKind::Concurrent) {
        ax = f_.owner() == Player::Max ? x : opp;
        bx = f_.owner() == Player::Max ? opp : x;
      } else if (Strategy::acts_at(f_.owner(), k)) {
        ax = f_.owner() == Player::Max ? x : 0;
        bx = f_.owner() == Player::Max ? 0 : x;
      } else {
        ax = a;
        bx = b;
      }
      auto d = g_.transition(base, ax, bx);
      if (!d.is_finite()) {
        if (mix.items.size() != 1) throw std::invalid_argument("induce_mdp: randomized choice into a countable distribution");
        Mode m = pp.mode;
        const Strategy* f = &f_;
        return d.map<StateId>([f, base, ax, bx, m, t, nt](const StateId& nx) {
          ActionProfile ap{ax, bx, &nx};
          Mix u = f->update(base, ap, m, t);
          if (!u.is_dirac()) throw std::invalid_argument("induce_mdp: randomized update on a countable distribution");
          return product_id(nx, u.items[0].first, nt);
        });
      }
      for (const auto& [nx, p] : d.items()) {
        ActionProfile ap{ax, bx, &nx};
        Mix u = f_.update(base, ap, pp.mode, t);
        for (const auto& [m2, pm] : u.items) out.emplace_back(product_id(nx, m2, nt), Prob(px * p.v * pm));
      }
    }
    return Dist<StateId>::finite(std::move(out));
  }

 private:
  ProductParts parts(const StateId& s) const {
    auto p = product_parts(s);
    if (!p) throw std::invalid_argument("induce_mdp: not a product state " + encode(s));
    return *p;
  }

  const Game& g_;
  const Strategy& f_;
  bool timed_;
};

}  // namespace

FiniteGame induce_mdp(const Game& game, const Strategy& fixed, const Truncation& trunc, const InduceOptions& opts) {
  if (!fixed.spec().bounded()) throw std::invalid_argument("induce_mdp: unbounded memory in " + fixed.name());
  bool timed = fixed.spec().uses_step_counter;
  if (timed && !opts.time_horizon) throw std::invalid_argument("induce_mdp: step-counter strategy needs a time horizon");
  uint64_t T = opts.time_horizon.value_or(0);
  ProductGame pg(game, fixed, timed);
  Truncation t2;
  t2.policy = trunc.policy;
  t2.radius = trunc.radius;
  t2.branch_budget = trunc.branch_budget;
  t2.tail_budget = trunc.tail_budget;
  t2.max_states = trunc.max_states;
  auto inside = trunc.inside;
  uint64_t mc = *fixed.spec().mode_count;
  t2.inside = [inside, timed, T, mc](const StateId& s) {
    auto p = product_parts(s);
    if (!p) return false;
    if (p->mode >= mc) throw std::logic_error("induce_mdp: memory update outside mode range");
    if (timed && *p->time >= T) return false;
    return inside(p->base);
  };
  std::optional<uint64_t> t0;
  if (timed) t0 = 0;
  for (const auto& s : trunc.starts) t2.starts.push_back(product_id(s, fixed.spec().initial_mode, t0));
  return explore(pg, t2);
}

namespace {

struct Choices {
  uint32_t begin, end;  // cell range
};

Choices choices_of(const FiniteGame& g, NodeIdx i, Player optimizing) {
  const auto& n = g.node(i);
  uint32_t c0 = n.cell0, cnt = n.na * n.nb;
  if (n.na > 1 && n.nb > 1) throw std::invalid_argument("best_response_value: concurrent node " + encode(g.id(i)));
  if (cnt > 1) {
    Player owner = n.na > 1 ? Player::Max : Player::Min;
    if (owner != optimizing) throw std::invalid_argument("best_response_value: opponent choice at " + encode(g.id(i)));
  }
  return {c0, c0 + cnt};
}

inline double cell_value(const FiniteGame& g, uint32_t c, const double* v) {
  uint32_t b = g.cell_begin(c), e = g.cell_end(c);
  return kernels::dot_gather(g.edge_p() + b, g.edge_to() + b, v, e - b);
}

// Nodes from which the target is reached with positive probability: for every
// choice (all = true) or for some choice.
std::vector<char> positive_reach(const FiniteGame& g, bool all) {
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
  auto qualifies = [&](NodeIdx i) {
    const auto& nd = g.node(i);
    uint32_t cnt = nd.na * nd.nb;
    uint32_t good = 0;
    for (uint32_t c = nd.cell0; c < nd.cell0 + cnt; ++c) {
      bool hit = false;
      for (uint32_t e = g.cell_begin(c); e < g.cell_end(c) && !hit; ++e) hit = in[g.edge_to()[e]];
      good += hit;
    }
    return all ? good == cnt : good > 0;
  };
  while (!work.empty()) {
    NodeIdx j = work.back();
    work.pop_back();
    for (NodeIdx i : pred[j]) {
      if (in[i]) continue;
      if (qualifies(i)) {
        in[i] = 1;
        work.push_back(i);
      }
    }
  }
  return in;
}

// Tarjan SCC over nodes in `alive`, following edges of cells in `cell_ok`.
std::vector<int32_t> scc(const FiniteGame& g, const std::vector<char>& alive, const std::vector<char>& cell_ok) {
  size_t n = g.size();
  std::vector<int32_t> comp(n, -1), low(n, 0), idx(n, -1);
  std::vector<NodeIdx> stack;
  std::vector<char> on(n, 0);
  int32_t counter = 0, ncomp = 0;
  struct Frame {
    NodeIdx v;
    uint32_t c, e;
  };
  std::vector<Frame> call;
  for (NodeIdx root = 0; root < n; ++root) {
    if (!alive[root] || idx[root] >= 0) continue;
    auto push = [&](NodeIdx v) {
      idx[v] = low[v] = counter++;
      stack.push_back(v);
      on[v] = 1;
      uint32_t c0 = g.node(v).cell0;
      call.push_back({v, c0, g.cell_begin(c0)});
    };
    push(root);
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& nd = g.node(f.v);
      uint32_t cend = nd.cell0 + nd.na * nd.nb;
      bool descended = false;
      while (f.c < cend) {
        if (!cell_ok[f.c]) {
          ++f.c;
          if (f.c < cend) f.e = g.cell_begin(f.c);
          continue;
        }
        if (f.e >= g.cell_end(f.c)) {
          ++f.c;
          if (f.c < cend) f.e = g.cell_begin(f.c);
          continue;
        }
        NodeIdx w = NodeIdx(g.edge_to()[f.e++]);
        if (!alive[w]) continue;
        if (idx[w] < 0) {
          push(w);
          descended = true;
          break;
        }
        if (on[w]) low[f.v] = std::min(low[f.v], idx[w]);
      }
      if (descended) continue;
      NodeIdx v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == idx[v]) {
        while (true) {
          NodeIdx w = stack.back();
          stack.pop_back();
          on[w] = 0;
          comp[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
    }
  }
  return comp;
}

// Maximal end components among nodes in `cand`. Returns component ids (-1 when
// not in an end component) and marks cells that stay inside their component.
std::vector<int32_t> mec_decompose(const FiniteGame& g, std::vector<char> cand, std::vector<char>& cell_in) {
  size_t n = g.size();
  cell_in.assign(g.num_cells(), 0);
  for (NodeIdx i = 0; i < n; ++i) {
    if (!cand[i]) continue;
    const auto& nd = g.node(i);
    for (uint32_t c = nd.cell0; c < nd.cell0 + nd.na * nd.nb; ++c) cell_in[c] = 1;
  }
  std::vector<int32_t> comp;
  while (true) {
    comp = scc(g, cand, cell_in);
    bool changed = false;
    for (NodeIdx i = 0; i < n; ++i) {
      if (!cand[i]) continue;
      const auto& nd = g.node(i);
      bool any = false;
      for (uint32_t c = nd.cell0; c < nd.cell0 + nd.na * nd.nb; ++c) {
        if (!cell_in[c]) continue;
        bool stays = true;
        for (uint32_t e = g.cell_begin(c); e < g.cell_end(c) && stays; ++e) {
          NodeIdx w = NodeIdx(g.edge_to()[e]);
          stays = cand[w] && comp[w] == comp[i];
        }
        if (!stays) {
          cell_in[c] = 0;
          changed = true;
        } else {
          any = true;
        }
      }
      if (!any) {
        cand[i] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (NodeIdx i = 0; i < n; ++i)
    if (!cand[i]) comp[i] = -1;
  return comp;
}

std::vector<uint32_t> greedy(const FiniteGame& g, const std::vector<double>& v, Player optimizing,
                             const std::vector<uint32_t>* prev) {
  std::vector<uint32_t> ch(g.size(), 0);
  for (NodeIdx i = 0; i < g.size(); ++i) {
    auto [b, e] = choices_of(g, i, optimizing);
    if (e - b <= 1) continue;
    uint32_t best = prev ? (*prev)[i] : 0;
    double bv = cell_value(g, b + best, v.data());
    for (uint32_t c = b; c < e; ++c) {
      double x = cell_value(g, c, v.data());
      bool better = optimizing == Player::Max ? x > bv + 1e-13 : x < bv - 1e-13;
      if (better) {
        bv = x;
        best = c - b;
      }
    }
    ch[i] = best;
  }
  return ch;
}

}  // namespace

std::vector<double> evaluate_policy(const FiniteGame& g, const std::vector<uint32_t>& choice) {
  size_t n = g.size();
  auto cell = [&](NodeIdx i) { return g.node(i).cell0 + choice[i]; };
  // Nodes that reach the target with positive probability in the chain.
  std::vector<std::vector<NodeIdx>> pred(n);
  for (NodeIdx i = 0; i < n; ++i) {
    uint32_t c = cell(i);
    for (uint32_t e = g.cell_begin(c); e < g.cell_end(c); ++e) pred[g.edge_to()[e]].push_back(i);
  }
  std::vector<char> reach(n, 0);
  std::vector<NodeIdx> work;
  for (NodeIdx i = 0; i < n; ++i)
    if (g.node(i).target) {
      reach[i] = 1;
      work.push_back(i);
    }
  while (!work.empty()) {
    NodeIdx j = work.back();
    work.pop_back();
    for (NodeIdx i : pred[j])
      if (!reach[i]) {
        reach[i] = 1;
        work.push_back(i);
      }
  }
  std::vector<int32_t> var(n, -1);
  int32_t nv = 0;
  for (NodeIdx i = 0; i < n; ++i)
    if (reach[i] && !g.node(i).target) var[i] = nv++;
  std::vector<double> x(n, 0.0);
  for (NodeIdx i = 0; i < n; ++i)
    if (g.node(i).target) x[i] = 1.0;
  if (nv == 0) return x;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
  for (NodeIdx i = 0; i < n; ++i) {
    if (var[i] < 0) continue;
    trip.emplace_back(var[i], var[i], 1.0);
    uint32_t c = cell(i);
    for (uint32_t e = g.cell_begin(c); e < g.cell_end(c); ++e) {
      NodeIdx w = NodeIdx(g.edge_to()[e]);
      double p = g.edge_p()[e];
      if (g.node(w).target)
        rhs[var[i]] += p;
      else if (var[w] >= 0)
        trip.emplace_back(var[i], var[w], -p);
    }
  }
  Eigen::SparseMatrix<double> A(nv, nv);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("evaluate_policy: singular chain system");
  Eigen::VectorXd sol = lu.solve(rhs);
  for (NodeIdx i = 0; i < n; ++i)
    if (var[i] >= 0) x[i] = std::clamp(sol[var[i]], 0.0, 1.0);
  return x;
}

std::vector<ValueInterval> best_response_value(const FiniteGame& g, Player opt, const BestResponseOptions& opts) {
  size_t n = g.size();
  for (NodeIdx i = 0; i < n; ++i) (void)choices_of(g, i, opt);

  // Lower end: value iteration from 0 (Gauss-Seidel order keeps iterates below the least fixed point).
  std::vector<double> lo(n, 0.0);
  for (NodeIdx i = 0; i < n; ++i)
    if (g.node(i).target) lo[i] = 1.0;
  // Nodes that cannot reach the target stay at 0 in every solution.
  auto pos = positive_reach(g, opt == Player::Min);
  auto sweep_lo = [&]() {
    double delta = 0.0;
    for (NodeIdx i = 0; i < n; ++i) {
      if (g.node(i).target || !pos[i]) continue;
      auto [b, e] = choices_of(g, i, opt);
      double v = cell_value(g, b, lo.data());
      for (uint32_t c = b + 1; c < e; ++c) {
        double x = cell_value(g, c, lo.data());
        v = opt == Player::Max ? std::max(v, x) : std::min(v, x);
      }
      delta = std::max(delta, v - lo[i]);
      lo[i] = v;
    }
    return delta;
  };

  std::vector<double> hi(n, 1.0);
  if (!opts.upper) {
    for (uint64_t it = 0; it < opts.max_iters; ++it)
      if (sweep_lo() < opts.tol) break;
    std::vector<ValueInterval> out(n);
    for (NodeIdx i = 0; i < n; ++i) out[i] = ValueInterval(lo[i], 1.0);
    return out;
  }

  if (opt == Player::Min) {
    // For minimal reach, pinning the zero-probability nodes to 0 makes the
    // fixed point unique, so policy iteration started from any policy converges
    // to it; each evaluated policy is itself a sound upper end.
    for (uint64_t it = 0; it < 64; ++it)
      if (sweep_lo() < opts.tol) break;
    auto pol = greedy(g, lo, opt, nullptr);
    for (NodeIdx i = 0; i < n; ++i) {
      if (pos[i]) continue;
      // Pick a choice that avoids the target set entirely.
      auto [b, e] = choices_of(g, i, opt);
      for (uint32_t c = b; c < e; ++c) {
        bool safe = true;
        for (uint32_t x = g.cell_begin(c); x < g.cell_end(c) && safe; ++x) safe = !pos[g.edge_to()[x]];
        if (safe) {
          pol[i] = c - b;
          break;
        }
      }
    }
    std::vector<double> val = evaluate_policy(g, pol);
    for (int round = 0; round < 200; ++round) {
      auto next = greedy(g, val, opt, &pol);
      for (NodeIdx i = 0; i < n; ++i)
        if (!pos[i]) next[i] = pol[i];
      if (next == pol) break;
      pol = std::move(next);
      val = evaluate_policy(g, pol);
    }
    hi = val;
    // The pinned fixed point is unique, so a post-fixed point w <= T(w) lies
    // below it. Shifting the policy value down slightly usually is one, where the
  // shift survives at nodes that carry it unchanged up to rounding.
    for (double delta : {1e-12, 1e-10, 1e-8}) {
      std::vector<double> w(n);
      for (NodeIdx i = 0; i < n; ++i)
        w[i] = g.node(i).target ? 1.0 : pos[i] ? std::max(0.0, val[i] - delta) : 0.0;
      bool post = true;
      for (NodeIdx i = 0; i < n && post; ++i) {
        if (g.node(i).target || !pos[i]) continue;
        auto [b, e] = choices_of(g, i, opt);
        double v = cell_value(g, b, w.data());
        for (uint32_t c = b + 1; c < e; ++c) v = std::min(v, cell_value(g, c, w.data()));
        post = w[i] <= v + 1e-13;  // rounding in the solve and dot products
      }
      if (post) {
        for (NodeIdx i = 0; i < n; ++i) lo[i] = std::max(lo[i], w[i]);
        break;
      }
    }
    for (uint64_t it = 0; it < opts.max_iters; ++it) {
      if (sweep_lo() < opts.tol) break;
      if (it % 16 == 0) {
        double gap = 0.0;
        for (NodeIdx i = 0; i < n; ++i) gap = std::max(gap, hi[i] - lo[i]);
        if (gap < opts.tol) break;
      }
    }
  } else {
    // Maximal reach: collapse end components, then iterate down from 1.
    std::vector<char> cand(n, 0);
    for (NodeIdx i = 0; i < n; ++i) cand[i] = pos[i] && !g.node(i).target;
    std::vector<char> cell_in;
    auto comp = mec_decompose(g, cand, cell_in);
    int32_t ncomp = 0;
    for (auto c : comp) ncomp = std::max(ncomp, c + 1);
    // Exit cells per component.
    std::vector<std::vector<uint32_t>> exits(ncomp);
    for (NodeIdx i = 0; i < n; ++i) {
      if (comp[i] < 0) continue;
      auto [b, e] = choices_of(g, i, opt);
      for (uint32_t c = b; c < e; ++c)
        if (!cell_in[c]) exits[comp[i]].push_back(c);
    }
    for (NodeIdx i = 0; i < n; ++i)
      if (!pos[i]) hi[i] = 0.0;
    std::vector<double> cval(ncomp, 1.0);
    auto sweep_hi = [&]() {
      double delta = 0.0;
      for (int32_t k = 0; k < ncomp; ++k) {
        double v = 0.0;
        for (uint32_t c : exits[k]) v = std::max(v, cell_value(g, c, hi.data()));
        delta = std::max(delta, cval[k] - v);
        cval[k] = v;
      }
      for (NodeIdx i = 0; i < n; ++i) {
        if (g.node(i).target || !pos[i]) continue;
        double v;
        if (comp[i] >= 0) {
          v = cval[comp[i]];
        } else {
          auto [b, e] = choices_of(g, i, opt);
          v = cell_value(g, b, hi.data());
          for (uint32_t c = b + 1; c < e; ++c) v = std::max(v, cell_value(g, c, hi.data()));
        }
        delta = std::max(delta, hi[i] - v);
        hi[i] = std::min(hi[i], v);
      }
      return delta;
    };
    for (uint64_t it = 0; it < opts.max_iters; ++it) {
      double dl = sweep_lo();
      double dh = sweep_hi();
      if (dl < opts.tol && dh < opts.tol) {
        double gap = 0.0;
        for (NodeIdx i = 0; i < n; ++i) gap = std::max(gap, hi[i] - lo[i]);
        if (gap < 1e-6 || (dl == 0 && dh == 0)) break;
      }
    }
    // A greedy policy's exact value is also a valid lower end.
    auto pol = greedy(g, hi, opt, nullptr);
    auto pv = evaluate_policy(g, pol);
    for (NodeIdx i = 0; i < n; ++i) lo[i] = std::max(lo[i], std::min(pv[i], hi[i]));
  }

  std::vector<ValueInterval> out(n);
  for (NodeIdx i = 0; i < n; ++i) {
    double l = std::min(lo[i], hi[i]);
    out[i] = ValueInterval(l, std::max(l, hi[i]));
  }
  return out;
}

}  // namespace cg
