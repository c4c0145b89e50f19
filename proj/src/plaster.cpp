#include <algorithm>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "cg/solver.hpp"

namespace cg {

namespace {

constexpr uint64_t kMaxHorizon = 1u << 14;

bool defined_node(const FiniteGame& g, NodeIdx i) { return !g.node(i).target && g.node(i).na * g.node(i).nb > 0; }

// One Jacobi step from v, optionally recording the Maximizer mix at every node.
void jacobi_step(const FiniteGame& g, const std::vector<double>& v, std::vector<double>& w,
                 std::vector<std::vector<double>>* mixes) {
  for (NodeIdx i = 0; i < g.size(); ++i) {
    if (!defined_node(g, i)) {
      w[i] = g.node(i).target ? 1.0 : 0.0;
      continue;
    }
    auto m = stage_matrix(g, i, v);
    for (auto& row : m)
      for (auto& x : row) x = std::clamp(x, 0.0, 1.0);
    auto sol = matrix_game_value(m);
    w[i] = sol.value;
    if (mixes) (*mixes)[i] = std::move(sol.row);
  }
}

std::vector<NodeIdx> closure(const FiniteGame& g, const std::vector<NodeIdx>& starts, uint64_t n) {
  std::vector<char> seen(g.size(), 0);
  std::vector<NodeIdx> frontier, out;
  for (NodeIdx s : starts)
    if (!seen[s]) {
      seen[s] = 1;
      frontier.push_back(s);
      out.push_back(s);
    }
  for (uint64_t d = 0; d < n && !frontier.empty(); ++d) {
    std::vector<NodeIdx> next;
    for (NodeIdx i : frontier) {
      const auto& nd = g.node(i);
      if (nd.target) continue;
      for (uint32_t c = nd.cell0; c < nd.cell0 + nd.na * nd.nb; ++c)
        for (uint32_t e = g.cell_begin(c); e < g.cell_end(c); ++e) {
          NodeIdx j = NodeIdx(g.edge_to()[e]);
          if (!seen[j]) {
            seen[j] = 1;
            next.push_back(j);
            out.push_back(j);
          }
        }
    }
    frontier = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

NonUniformResult non_uniform_memoryless(const FiniteGame& g, const std::vector<NodeIdx>& starts, double eps) {
  NonUniformResult res;
  auto vi = value_iteration(g);
  const double eps4 = eps / 4;

  // Horizon after which the bounded game is within eps/4 at every start;
  // iterate mixes at powers of two are kept as candidates along the way.
  std::vector<double> v(g.size()), w(g.size());
  for (NodeIdx i = 0; i < g.size(); ++i) v[i] = g.node(i).target ? 1.0 : 0.0;
  std::vector<std::pair<uint64_t, std::vector<std::vector<double>>>> iterates;
  uint64_t n = 0;
  bool reached = false;
  for (uint64_t k = 1; k <= kMaxHorizon; ++k) {
    bool record = (k & (k - 1)) == 0 && k >= 4;
    std::vector<std::vector<double>> mixes;
    if (record) mixes.assign(g.size(), {});
    jacobi_step(g, v, w, record ? &mixes : nullptr);
    std::swap(v, w);
    if (record) iterates.emplace_back(k, std::move(mixes));
    if (!reached) {
      bool ok = true;
      for (NodeIdx s : starts) ok = ok && v[s] >= vi.value[s] - eps4;
      if (ok) {
        reached = true;
        n = k;
      }
    }
    if (reached && record && k >= 4 * n) break;
  }
  if (!reached) n = kMaxHorizon;
  res.horizon = n;
  res.region = closure(g, starts, n);

  std::vector<StateId> window;
  for (NodeIdx i : res.region) window.push_back(g.id(i));
  auto gr = truncate(g, window, BoundaryPolicy::PessimisticMax);
  std::vector<NodeIdx> rstarts;
  for (NodeIdx s : starts) rstarts.push_back(gr.at(g.id(s)));

  auto restrict_mix = [&](const std::vector<std::vector<double>>& full) {
    std::vector<std::vector<double>> out(gr.size());
    for (NodeIdx j = 0; j < gr.size(); ++j) {
      if (gr.node(j).na <= 1 || gr.node(j).target) continue;
      out[j] = full[g.at(gr.id(j))];
    }
    return out;
  };

  std::vector<std::pair<std::string, const std::vector<std::vector<double>>*>> cands = {
      {"vi", &vi.max_mix}, {"sticky", &vi.sticky_max_mix}};
  for (const auto& [k, m] : iterates) cands.emplace_back("iterate-" + std::to_string(k), &m);

  for (NodeIdx s : starts) res.values.push_back(vi.value[s]);
  double best_margin = -1e300;
  for (const auto& [name, full] : cands) {
    auto att = memoryless_attainment(gr, restrict_mix(*full));
    std::vector<double> got;
    double margin = 1e300;
    for (size_t k = 0; k < starts.size(); ++k) {
      got.push_back(att[rstarts[k]].lo);
      margin = std::min(margin, got.back() - (res.values[k] - eps));
    }
    if (margin > best_margin) {
      best_margin = margin;
      res.attained = got;
      res.candidate = name;
      res.mix.assign(g.size(), {});
      for (NodeIdx i = 0; i < g.size(); ++i) res.mix[i] = vi.max_mix[i];
      for (NodeIdx i : res.region) res.mix[i] = (*full)[i];
    }
    if (margin >= 0) {
      res.ok = true;
      break;
    }
  }
  return res;
}

PlasterLedger plaster(const FiniteGame& layered, double eps, const std::vector<StateId>& order) {
  PlasterLedger led;
  std::set<StateId> bases;
  auto parts = [&](NodeIdx i) {
    auto p = layer_parts(layered.id(i));
    if (!p) throw std::invalid_argument("plaster: not a layered state " + encode(layered.id(i)));
    return *p;
  };
  for (NodeIdx i = 0; i < layered.size(); ++i) bases.insert(parts(i).first);

  std::set<StateId> f0, f1, s1_prev;
  size_t next_order = 0;
  for (int round = 1;; ++round) {
    std::set<StateId> s0;
    while (next_order < order.size() && !bases.count(order[next_order])) {
      led.invariant_violations.push_back("order state outside the game: " + encode(order[next_order]));
      ++next_order;
    }
    if (next_order < order.size()) s0.insert(order[next_order++]);
    for (const auto& s : s1_prev) s0.insert(s);
    for (const auto& s : f0) s0.erase(s);
    if (s0.empty()) {
      if (next_order >= order.size()) break;
      continue;
    }
    std::set<StateId> f0_now = f0;
    f0_now.insert(s0.begin(), s0.end());
    const double eps_i = std::ldexp(eps, -round);

    // Auxiliary game: both copies on f0_now, a single copy (the second one) elsewhere.
    FiniteGame::Builder b("plaster-aux");
    std::vector<int64_t> aux_of(layered.size(), -1);
    auto keep = [&](NodeIdx i) {
      auto [s, bit] = parts(i);
      return bit == 1 || f0_now.count(s);
    };
    for (NodeIdx i = 0; i < layered.size(); ++i)
      if (keep(i)) aux_of[i] = b.intern(layered.id(i));
    auto redirect = [&](NodeIdx j) -> NodeIdx {
      if (aux_of[j] >= 0) return NodeIdx(aux_of[j]);
      return NodeIdx(aux_of[layered.at(layer_id(parts(j).first, 1))]);
    };
    for (NodeIdx i = 0; i < layered.size(); ++i) {
      if (aux_of[i] < 0) continue;
      const auto& nd = layered.node(i);
      std::vector<Cell> cells;
      for (uint32_t c = nd.cell0; c < nd.cell0 + nd.na * nd.nb; ++c) {
        Cell cell;
        for (uint32_t e = layered.cell_begin(c); e < layered.cell_end(c); ++e)
          cell.push_back({redirect(NodeIdx(layered.edge_to()[e])), layered.edge_p()[e]});
        cells.push_back(std::move(cell));
      }
      b.define(NodeIdx(aux_of[i]), nd.kind, nd.target, nd.na, nd.nb, std::move(cells));
    }
    auto aux0 = std::move(b).build();
    std::vector<std::vector<double>> fixed(aux0.size());
    for (NodeIdx j = 0; j < aux0.size(); ++j) {
      auto it = led.fixings.find(aux0.id(j));
      if (it != led.fixings.end()) fixed[j] = it->second;
    }
    auto aux = fix_mixes(aux0, fixed, Player::Max);
    std::vector<NodeIdx> starts;
    for (const auto& s : s0) starts.push_back(aux.at(layer_id(s, 0)));
    auto nu = non_uniform_memoryless(aux, starts, eps_i);
    if (!nu.ok)
      led.invariant_violations.push_back("round " + std::to_string(round) + ": no memoryless candidate within " +
                                         std::to_string(eps_i));

    // Mixes are recorded against the unfixed auxiliary game's action sets.
    auto record = [&](const StateId& id) {
      if (led.fixings.count(id)) return;
      NodeIdx j = aux0.at(id);
      if (aux0.node(j).na <= 1 || aux0.node(j).target) return;
      led.fixings[id] = nu.mix[aux.at(id)];
    };
    std::set<StateId> s1;
    for (const auto& s : s0) {
      record(layer_id(s, 0));
      if (!f1.count(s)) {
        record(layer_id(s, 1));
        s1.insert(s);
      }
    }
    for (NodeIdx j : nu.region) {
      auto [s, bit] = *layer_parts(aux.id(j));
      if (bit == 1 && !f0_now.count(s)) {
        record(layer_id(s, 1));
        s1.insert(s);
      }
    }
    PlasterRound pr;
    pr.s0.assign(s0.begin(), s0.end());
    pr.s1.assign(s1.begin(), s1.end());
    f0 = std::move(f0_now);
    f1.insert(s1.begin(), s1.end());
    pr.f0.assign(f0.begin(), f0.end());
    pr.f1.assign(f1.begin(), f1.end());
    pr.epsilon = eps_i;
    pr.candidate = nu.candidate;
    led.rounds.push_back(std::move(pr));
    s1_prev = std::move(s1);
  }
  for (const auto& [id, m] : led.fixings) {
    double t = 0;
    for (double x : m) t += x;
    if (std::abs(t - 1.0) > 1e-9) led.invariant_violations.push_back("fixing mass at " + encode(id));
  }
  return led;
}

std::function<Mix(const StateId&)> ledger_mix(const PlasterLedger& ledger, const FiniteGame& layered) {
  const auto* fix = &ledger.fixings;
  const FiniteGame* g = &layered;
  return [fix, g](const StateId& s) {
    Mix m;
    auto idx = g->find(s);
    if (!idx) return m;
    const auto& nd = g->node(*idx);
    if (nd.target || nd.na <= 1) return m;
    auto it = fix->find(s);
    if (it == fix->end()) {
      for (uint32_t a = 0; a < nd.na; ++a) m.add(a, 1.0 / nd.na);
      return m;
    }
    for (size_t a = 0; a < it->second.size(); ++a) m.add(a, it->second[a]);
    return m;
  };
}

}  // namespace cg
