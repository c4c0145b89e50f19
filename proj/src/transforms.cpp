#include <cmath>
#include <stdexcept>

#include "cg/solver.hpp"

namespace cg {

Strategy acyclic_min_md(const Game& game, std::function<double(const StateId&)> values, double eps,
                        std::function<uint64_t(const StateId&)> iota, uint64_t budget) {
  if (!(eps > 0)) throw std::invalid_argument("acyclic_min_md: eps must be positive");
  const double le = std::log1p(eps);
  const Game* g = &game;
  return Strategy::memoryless(
      "acyclic-min-md", Player::Min,
      [g, values, iota, le, budget](const StateId& s) {
        double bound = values(s) * (1.0 + le * std::ldexp(1.0, -int(std::min<uint64_t>(iota(s), 1000))));
        uint64_t n = g->num_actions(s, Player::Min).value_or(budget);
        n = std::min(n, budget);
        for (uint64_t k = 0; k < n; ++k) {
          double v = 0.0;
          g->choose(s, k).for_each([&](const StateId& x, double p) { v += p * values(x); }, 1e-15);
          if (v <= bound + 1e-15) return Mix::dirac(k);
        }
        throw std::runtime_error("acyclic_min_md: no successor within the error budget at " + encode(s));
      },
      true);
}

StateId clock_id(const StateId& s, uint64_t i) { return wrap(Tag::ClockWrapped, s, {int64_t(i)}); }

namespace {

std::pair<StateId, uint64_t> clock_parts(const StateId& s) {
  auto u = unwrap(s);
  if (s.tag != Tag::ClockWrapped || !u || u->second.size() != 1)
    throw std::invalid_argument("not a clock state: " + encode(s));
  return {u->first, uint64_t(u->second[0])};
}

class ClockGame final : public Game {
 public:
  explicit ClockGame(std::shared_ptr<const Game> g) : g_(std::move(g)) {}
  std::string name() const override { return "clock(" + g_->name() + ")"; }
  NodeKind kind(const StateId& s) const override { return g_->kind(clock_parts(s).first); }
  bool is_target(const StateId& s) const override { return g_->is_target(clock_parts(s).first); }
  Count num_actions(const StateId& s, Player p) const override { return g_->num_actions(clock_parts(s).first, p); }
  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    auto [base, i] = clock_parts(s);
    if (g_->is_target(base)) return Dist<StateId>::dirac(clock_id(base, i + 1));
    uint64_t next = i + 1;
    return g_->transition(base, a, b).map<StateId>([next](const StateId& x) { return clock_id(x, next); });
  }
  std::optional<StateId> start_hint() const override {
    if (auto h = g_->start_hint()) return clock_id(*h, 0);
    return std::nullopt;
  }
  std::vector<Family> families() const override {
    std::vector<Family> out;
    for (const auto& f : g_->families()) {
      Family c;
      c.tag = Tag::ClockWrapped;
      c.arity = f.arity + 1;
      c.offset = f.offset;
      c.make = [f](const std::vector<uint64_t>& xs) {
        std::vector<uint64_t> head(xs.begin(), xs.end() - 1);
        return clock_id(f.make(head), xs.back());
      };
      c.unmake = [f](const StateId& s) -> std::optional<std::vector<uint64_t>> {
        auto u = unwrap(s);
        if (s.tag != Tag::ClockWrapped || !u || u->second.size() != 1) return std::nullopt;
        if (u->first.tag != f.tag) return std::nullopt;
        auto t = f.unmake(u->first);
        if (!t) return std::nullopt;
        t->push_back(uint64_t(u->second[0]));
        return t;
      };
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  std::shared_ptr<const Game> g_;
};

class LayerGame final : public Game {
 public:
  explicit LayerGame(std::shared_ptr<const Game> g) : g_(std::move(g)) {}
  std::string name() const override { return "layer(" + g_->name() + ")"; }
  NodeKind kind(const StateId& s) const override { return g_->kind(parts(s).first); }
  bool is_target(const StateId& s) const override { return g_->is_target(parts(s).first); }
  Count num_actions(const StateId& s, Player p) const override {
    auto base = parts(s).first;
    Count c = g_->num_actions(base, p);
    if (p == Player::Max && max_chooses(base) && c) return *c * 2;
    return c;
  }
  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    auto [base, bit] = parts(s);
    if (max_chooses(base)) {
      int nb = int(a % 2);
      return g_->transition(base, a / 2, b).map<StateId>([nb](const StateId& x) { return layer_id(x, nb); });
    }
    int keep = bit;
    return g_->transition(base, a, b).map<StateId>([keep](const StateId& x) { return layer_id(x, keep); });
  }
  std::vector<Family> families() const override {
    std::vector<Family> out;
    for (const auto& f : g_->families()) {
      for (int bit = 0; bit < 2; ++bit) {
        Family c;
        c.tag = bit ? Tag::Layer1 : Tag::Layer0;
        c.arity = f.arity;
        c.offset = f.offset;
        c.make = [f, bit](const std::vector<uint64_t>& xs) { return layer_id(f.make(xs), bit); };
        c.unmake = [f, bit](const StateId& s) -> std::optional<std::vector<uint64_t>> {
          auto p = layer_parts(s);
          if (!p || p->second != bit || p->first.tag != f.tag) return std::nullopt;
          return f.unmake(p->first);
        };
        out.push_back(std::move(c));
      }
    }
    return out;
  }

 private:
  bool max_chooses(const StateId& base) const {
    if (g_->is_target(base)) return false;
    NodeKind k = g_->kind(base);
    return k == NodeKind::Concurrent || k == NodeKind::MaxTurn;
  }
  static std::pair<StateId, int> parts(const StateId& s) {
    auto p = layer_parts(s);
    if (!p) throw std::invalid_argument("not a layered state: " + encode(s));
    return *p;
  }
  std::shared_ptr<const Game> g_;
};

}  // namespace

std::shared_ptr<Game> clock_expand(std::shared_ptr<const Game> game) { return std::make_shared<ClockGame>(std::move(game)); }

Strategy clock_pullback(const Strategy& positional) {
  Strategy base = positional;
  MemorySpec spec = positional.spec();
  spec.uses_step_counter = true;
  Strategy out(
      positional.name() + "|markov", positional.owner(), spec,
      [base](const StateId& s, Mode m, uint64_t t) { return base.act(clock_id(s, t), m, 0); },
      positional.has_update() ? Strategy::UpdateFn([base](const StateId& s, const ActionProfile& ap, Mode m, uint64_t t) {
        StateId nx = clock_id(*ap.next, t + 1);
        ActionProfile ap2{ap.a, ap.b, &nx};
        return base.update(clock_id(s, t), ap2, m, 0);
      })
                              : Strategy::UpdateFn{},
      positional.deterministic());
  return out;
}

Strategy clock_lift(const Strategy& markov) {
  Strategy base = markov;
  MemorySpec spec = markov.spec();
  spec.uses_step_counter = false;
  return Strategy(
      markov.name() + "|positional", markov.owner(), spec,
      [base](const StateId& s, Mode m, uint64_t) {
        auto [b, i] = clock_parts(s);
        return base.act(b, m, i);
      },
      markov.has_update() ? Strategy::UpdateFn([base](const StateId& s, const ActionProfile& ap, Mode m, uint64_t) {
        auto [b, i] = clock_parts(s);
        StateId nx = clock_parts(*ap.next).first;
        ActionProfile ap2{ap.a, ap.b, &nx};
        return base.update(b, ap2, m, i);
      })
                          : Strategy::UpdateFn{},
      markov.deterministic());
}

StateId layer_id(const StateId& s, int bit) { return wrap(bit ? Tag::Layer1 : Tag::Layer0, s); }

std::optional<std::pair<StateId, int>> layer_parts(const StateId& s) {
  if (s.tag != Tag::Layer0 && s.tag != Tag::Layer1) return std::nullopt;
  auto u = unwrap(s);
  if (!u || !u->second.empty()) return std::nullopt;
  return std::make_pair(u->first, s.tag == Tag::Layer1 ? 1 : 0);
}

std::shared_ptr<Game> layer(std::shared_ptr<const Game> game) { return std::make_shared<LayerGame>(std::move(game)); }

Strategy read_back_one_bit(std::function<Mix(const StateId&)> layered_mix, const std::string& name) {
  MemorySpec spec;
  spec.mode_count = 2;
  spec.initial_mode = 0;
  spec.visibility = Visibility::Public;
  auto act = [layered_mix](const StateId& s, Mode m, uint64_t) {
    Mix joint = layered_mix(layer_id(s, int(m)));
    Mix out;
    for (const auto& [k, p] : joint.items) out.add(k / 2, p);
    if (out.items.empty()) return Mix::dirac(0);
    return out;
  };
  auto update = [layered_mix](const StateId& s, const ActionProfile& ap, Mode m, uint64_t) {
    Mix joint = layered_mix(layer_id(s, int(m)));
    if (joint.items.empty()) return Mix::dirac(m);  // Maximizer does not move here
    double p0 = joint.prob(ap.a * 2), p1 = joint.prob(ap.a * 2 + 1);
    if (p0 + p1 <= 0) return Mix::dirac(m);
    return Mix::bernoulli(1, 0, p1 / (p0 + p1));
  };
  return Strategy(name, Player::Max, spec, act, update, false);
}

}  // namespace cg
