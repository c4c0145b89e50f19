#include "cg/finite_game.hpp"

#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace cg {

NodeIdx FiniteGame::Builder::intern(const StateId& s) {
  auto it = index_.find(s);
  if (it != index_.end()) return it->second;
  auto idx = NodeIdx(ids_.size());
  ids_.push_back(s);
  index_.emplace(s, idx);
  nodes_.emplace_back();
  cells_.emplace_back();
  defined_.push_back(0);
  return idx;
}

std::optional<NodeIdx> FiniteGame::Builder::find(const StateId& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void FiniteGame::Builder::define(NodeIdx i, NodeKind kind, bool target, uint32_t na, uint32_t nb,
                                 std::vector<Cell> cells) {
  if (cells.size() != size_t(na) * nb) throw std::invalid_argument("FiniteGame: cell count mismatch at " + encode(ids_.at(i)) + ": " + std::to_string(cells.size()) + " cells for " + std::to_string(na) + "x" + std::to_string(nb));
  for (auto& c : cells) {
    // Merge repeated destinations so cells are small and canonical.
    Cell merged;
    merged.reserve(c.size());
    for (const auto& e : c) {
      if (e.p <= 0.0) continue;
      bool found = false;
      for (auto& m : merged)
        if (m.to == e.to) {
          m.p += e.p;
          found = true;
          break;
        }
      if (!found) merged.push_back(e);
    }
    if (merged.empty()) throw std::invalid_argument("FiniteGame: empty cell at " + encode(ids_.at(i)));
    c = std::move(merged);
  }
  nodes_.at(i) = Node{kind, target, na, nb, 0};
  cells_[i] = std::move(cells);
  defined_[i] = 1;
}

void FiniteGame::Builder::absorbing(NodeIdx i, bool target) {
  define(i, NodeKind::Random, target, 1, 1, {Cell{Edge{i, 1.0}}});
}

FiniteGame FiniteGame::Builder::build() && {
  FiniteGame g;
  g.name_ = std::move(name_);
  for (size_t i = 0; i < ids_.size(); ++i)
    if (!defined_[i]) throw std::logic_error("FiniteGame: undefined node " + encode(ids_[i]));
  g.nodes_ = std::move(nodes_);
  g.ids_ = std::move(ids_);
  g.index_ = std::move(index_);
  g.cell_begin_.push_back(0);
  for (size_t i = 0; i < g.nodes_.size(); ++i) {
    g.nodes_[i].cell0 = uint32_t(g.cell_begin_.size() - 1);
    for (const auto& c : cells_[i]) {
      for (const auto& e : c) {
        g.edge_to_.push_back(int32_t(e.to));
        g.edge_p_.push_back(e.p);
      }
      g.cell_begin_.push_back(uint32_t(g.edge_to_.size()));
    }
  }
  return g;
}

NodeIdx FiniteGame::at(const StateId& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) throw std::out_of_range("FiniteGame: unknown state " + encode(s));
  return it->second;
}

std::optional<NodeIdx> FiniteGame::find(const StateId& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Count FiniteGame::num_actions(const StateId& s, Player p) const {
  const auto& n = nodes_[at(s)];
  return p == Player::Max ? n.na : n.nb;
}

Dist<StateId> FiniteGame::transition(const StateId& s, uint64_t a, uint64_t b) const {
  NodeIdx i = at(s);
  const auto& n = nodes_[i];
  if (a >= n.na || b >= n.nb) throw std::out_of_range("FiniteGame: action out of range at " + encode(s));
  uint32_t c = cell_index(i, uint32_t(a), uint32_t(b));
  boost::container::small_vector<Dist<StateId>::Item, 2> items;
  for (uint32_t e = cell_begin_[c]; e < cell_begin_[c + 1]; ++e) items.emplace_back(ids_[edge_to_[e]], Prob(edge_p_[e]));
  return Dist<StateId>::finite(std::move(items));
}

std::vector<Family> FiniteGame::families() const {
  std::vector<Family> out;
  out.reserve(ids_.size());
  for (size_t i = 0; i < ids_.size(); ++i) {
    StateId s = ids_[i];
    out.push_back(Family{s.tag, 0, i, [s](const std::vector<uint64_t>&) { return s; },
                         [s](const StateId& x) -> std::optional<std::vector<uint64_t>> {
                           if (x == s) return std::vector<uint64_t>{};
                           return std::nullopt;
                         }});
  }
  return out;
}

std::string policy_name(BoundaryPolicy p) {
  switch (p) {
    case BoundaryPolicy::PessimisticMax:
      return "pessimistic";
    case BoundaryPolicy::OptimisticMax:
      return "optimistic";
    case BoundaryPolicy::Certified:
      return "certified";
  }
  return "?";
}

StateId boundary_id() { return StateId(Tag::Boundary); }
StateId win_sink_id() { return StateId(Tag::Target, {0}); }
StateId lose_sink_id() { return StateId(Tag::Sink, {0}); }

namespace {

class Explorer {
 public:
  Explorer(const Game& g, const Truncation& t) : g_(g), t_(t), b_(g.name() + "|" + policy_name(t.policy)) {}

  FiniteGame run() {
    for (const auto& s : t_.starts) {
      if (!t_.inside(s)) throw std::invalid_argument("truncation start outside window: " + encode(s));
      enqueue(s);
    }
    while (!queue_.empty()) {
      StateId s = std::move(queue_.front());
      queue_.pop_front();
      expand(s);
      if (b_.size() > t_.max_states) throw std::runtime_error("truncation exceeds state budget for " + g_.name());
    }
    bool has_goal = saw_target_ || boundary_.has_value();
    auto g = std::move(b_).build();
    for (const auto& s : t_.starts) g.starts.push_back(g.at(s));
    g.degenerate = !has_goal;
    return g;
  }

 private:
  void enqueue(const StateId& s) {
    if (b_.known(s)) return;
    b_.intern(s);
    queue_.push_back(s);
  }

  NodeIdx boundary() {
    if (!boundary_) {
      boundary_ = b_.intern(boundary_id());
      b_.absorbing(*boundary_, t_.policy != BoundaryPolicy::PessimisticMax);
    }
    return *boundary_;
  }

  NodeIdx win_sink() {
    if (!win_) {
      win_ = b_.intern(win_sink_id());
      b_.absorbing(*win_, true);
    }
    return *win_;
  }
  NodeIdx lose_sink() {
    if (!lose_) {
      lose_ = b_.intern(lose_sink_id());
      b_.absorbing(*lose_, false);
    }
    return *lose_;
  }

  // Destination node for a transition into `s`.
  NodeIdx dest(const StateId& s) {
    if (t_.inside(s)) {
      enqueue(s);
      return *b_.find(s);
    }
    if (t_.policy == BoundaryPolicy::Certified && t_.certificate) return gadget(s);
    return boundary();
  }

  NodeIdx gadget(const StateId& exit) {
    StateId gid = wrap(Tag::Gadget, exit);
    if (auto f = b_.find(gid)) return *f;
    auto opts = t_.certificate->gadget(exit);
    if (!opts || opts->empty()) return boundary();
    NodeIdx gi = b_.intern(gid);
    std::vector<Cell> choices;
    for (size_t k = 0; k < opts->size(); ++k) {
      StateId oid = wrap(Tag::Gadget, exit, {int64_t(k)});
      NodeIdx oi = b_.intern(oid);
      Cell c;
      for (const auto& o : (*opts)[k]) {
        if (o.p <= 0) continue;
        switch (o.kind) {
          case GadgetOutcome::Win:
            c.push_back({win_sink(), o.p});
            break;
          case GadgetOutcome::Lose:
            c.push_back({lose_sink(), o.p});
            break;
          case GadgetOutcome::State:
            // Re-entry must stay inside; anything else falls back to the optimistic boundary.
            c.push_back({t_.inside(o.state) ? dest(o.state) : boundary(), o.p});
            break;
        }
      }
      b_.define(oi, NodeKind::Random, false, 1, 1, std::vector<Cell>(1, std::move(c)));
      choices.push_back(Cell{Edge{oi, 1.0}});
    }
    const uint32_t na = uint32_t(choices.size());
    b_.define(gi, NodeKind::MaxTurn, false, na, 1, std::move(choices));
    return gi;
  }

  Cell cell_of(const Dist<StateId>& d) {
    Cell c;
    double seen = 0.0;
    auto [n, tail] = d.for_each(
        [&](const StateId& s, double p) {
          if (p <= 0) return;
          c.push_back({dest(s), p});
          seen += p;
        },
        t_.tail_budget);
    (void)n;
    double rest = d.is_finite() ? 0.0 : std::max(tail, 1.0 - seen);
    if (rest > 0.0) c.push_back({boundary(), rest});
    return c;
  }

  void expand(const StateId& s) {
    NodeIdx i = *b_.find(s);
    if (g_.is_target(s)) {
      saw_target_ = true;
      b_.absorbing(i, true);
      return;
    }
    NodeKind k = g_.kind(s);
    Count ca = g_.num_actions(s, Player::Max);
    Count cb = g_.num_actions(s, Player::Min);
    bool inf_a = !ca.has_value(), inf_b = !cb.has_value();
    uint64_t na = inf_a ? t_.branch_budget : *ca;
    uint64_t nb = inf_b ? t_.branch_budget : *cb;
    if (k == NodeKind::Concurrent && (inf_a || inf_b))
      throw std::invalid_argument("concurrent node with infinite action set: " + encode(s));
    std::vector<Cell> cells;
    if (k == NodeKind::Concurrent) {
      cells.reserve(na * nb);
      for (uint64_t a = 0; a < na; ++a)
        for (uint64_t b = 0; b < nb; ++b) cells.push_back(cell_of(g_.transition(s, a, b)));
      b_.define(i, k, false, uint32_t(na), uint32_t(nb), std::move(cells));
      return;
    }
    uint64_t n = (k == NodeKind::MaxTurn) ? na : (k == NodeKind::MinTurn ? nb : 1);
    bool inf = (k == NodeKind::MaxTurn && inf_a) || (k == NodeKind::MinTurn && inf_b);
    for (uint64_t c = 0; c < n; ++c) cells.push_back(cell_of(g_.choose(s, c)));
    if (inf) cells.push_back(Cell{Edge{boundary(), 1.0}});  // all unenumerated choices
    uint32_t m = uint32_t(cells.size());
    if (k == NodeKind::MaxTurn)
      b_.define(i, k, false, m, 1, std::move(cells));
    else if (k == NodeKind::MinTurn)
      b_.define(i, k, false, 1, m, std::move(cells));
    else
      b_.define(i, k, false, 1, 1, std::move(cells));
  }

  const Game& g_;
  const Truncation& t_;
  FiniteGame::Builder b_;
  std::deque<StateId> queue_;
  std::optional<NodeIdx> boundary_, win_, lose_;
  bool saw_target_ = false;
};

}  // namespace

FiniteGame explore(const Game& g, const Truncation& t) {
  if (!t.inside) throw std::invalid_argument("truncation without window predicate");
  Explorer ex(g, t);
  return ex.run();
}

FiniteGame truncate(const Game& g, const std::vector<StateId>& window, BoundaryPolicy policy,
                    std::optional<TailCertificate> certificate) {
  if (window.empty()) throw std::invalid_argument("truncate: empty window");
  auto set = std::make_shared<std::unordered_set<StateId>>(window.begin(), window.end());
  Truncation t;
  t.inside = [set](const StateId& s) { return set->count(s) != 0; };
  t.policy = policy;
  t.starts = window;
  t.certificate = std::move(certificate);
  return explore(g, t);
}

}  // namespace cg
