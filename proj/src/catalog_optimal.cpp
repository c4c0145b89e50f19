#include <cmath>

#include "catalog_internal.hpp"

namespace cg::catalog {

using namespace detail;

namespace {

Prob pow2(int64_t i) {
  if (auto r = Rational::pow2_inv(i)) return Prob(*r);
  return Prob(std::ldexp(1.0, -int(i)));
}

// 1/2 - 2^{-i} and 1/2 + 2^{-i}.
Prob half_minus(int64_t i) {
  if (auto r = Rational::pow2_inv(i))
    if (auto x = Rational::sub(Rational(1, 2), *r)) return Prob(*x);
  return Prob(0.5 - std::ldexp(1.0, -int(i)));
}
Prob half_plus(int64_t i) {
  if (auto r = Rational::pow2_inv(i))
    if (auto x = Rational::add(Rational(1, 2), *r)) return Prob(*x);
  return Prob(0.5 + std::ldexp(1.0, -int(i)));
}

// The action a_i: target with 1 - 2^{-i}, losing sink with 2^{-i}.
Dist<StateId> action_a(int64_t i) {
  Prob p = pow2(i);
  return two_way(t_state(), p.complement(), lose(), p);
}

bool indexed(const StateId& s) { return s.params.size() == 1 && s.p(0) >= 1 && s.nest.empty(); }

class ConcOptMax final : public Game {
 public:
  std::string name() const override { return "conc_optmax"; }
  NodeKind kind(const StateId& s) const override {
    switch (check(s)) {
      case Tag::SPrime: return NodeKind::MinTurn;
      case Tag::SDoublePrime: return NodeKind::MaxTurn;
      default: return NodeKind::Random;
    }
  }
  bool is_target(const StateId& s) const override { return s == t_state(); }
  Count num_actions(const StateId& s, Player p) const override {
    NodeKind k = kind(s);
    if ((k == NodeKind::MinTurn && p == Player::Min) || (k == NodeKind::MaxTurn && p == Player::Max)) return 2;
    return 1;
  }
  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    switch (check(s)) {
      case Tag::S0:
        return Dist<StateId>::countable(
            [](uint64_t k) { return Dist<StateId>::Item(s_prime(int64_t(k) + 1), pow2(int64_t(k) + 1)); },
            [](uint64_t n) { return std::ldexp(1.0, -int(std::min<uint64_t>(n, 1100))); });
      case Tag::SPrime: return b == 0 ? action_a(s.p(0)) : Dist<StateId>::dirac(s_dprime(1));
      case Tag::SDoublePrime: return a == 0 ? Dist<StateId>::dirac(s_dprime(s.p(0) + 1)) : action_a(s.p(0));
      default: return Dist<StateId>::dirac(s);
    }
  }
  std::vector<Family> families() const override {
    return {single_family(s0(), 0), index_family(Tag::SPrime, 1), index_family(Tag::SDoublePrime, 1),
            single_family(t_state(), 1), single_family(lose(), 2)};
  }
  std::optional<StateId> start_hint() const override { return s0(); }

 private:
  Tag check(const StateId& s) const {
    if (s == s0() || s == t_state() || s == lose()) return s.tag;
    if ((s.tag == Tag::SPrime || s.tag == Tag::SDoublePrime) && indexed(s)) return s.tag;
    bad_state(name(), s);
  }
};

class InfBranchOptMin final : public Game {
 public:
  std::string name() const override { return "infbranch_optmin"; }
  NodeKind kind(const StateId& s) const override {
    switch (check(s)) {
      case Tag::S0: return NodeKind::MaxTurn;
      case Tag::U: return NodeKind::MinTurn;
      default: return NodeKind::Random;
    }
  }
  bool is_target(const StateId& s) const override { return s == t_state(); }
  Count num_actions(const StateId& s, Player p) const override {
    NodeKind k = kind(s);
    if ((k == NodeKind::MinTurn && p == Player::Min) || (k == NodeKind::MaxTurn && p == Player::Max))
      return std::nullopt;
    return 1;
  }
  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    switch (check(s)) {
      case Tag::S0: return Dist<StateId>::dirac(s_prime(int64_t(a) + 1));
      case Tag::U: return Dist<StateId>::dirac(s_dprime(int64_t(b) + 1));
      case Tag::SPrime: return two_way(t_state(), half_minus(s.p(0)), u(), half_plus(s.p(0)));
      case Tag::SDoublePrime: {
        Prob p = pow2(s.p(0));
        return two_way(t_state(), p, lose(), p.complement());
      }
      default: return Dist<StateId>::dirac(s);
    }
  }
  std::vector<Family> families() const override {
    return {single_family(s0(), 0),      index_family(Tag::SPrime, 1), single_family(u(), 0),
            index_family(Tag::SDoublePrime, 1), single_family(t_state(), 1), single_family(lose(), 2)};
  }
  std::optional<StateId> start_hint() const override { return s0(); }

 private:
  Tag check(const StateId& s) const {
    if (s == s0() || s == u() || s == t_state() || s == lose()) return s.tag;
    if ((s.tag == Tag::SPrime || s.tag == Tag::SDoublePrime) && indexed(s)) return s.tag;
    bad_state(name(), s);
  }
};

Strategy with_initial_mode(const Strategy& s, Mode m) {
  MemorySpec spec = s.spec();
  spec.initial_mode = m;
  Strategy base = s;
  Strategy out(
      s.name() + "[m=" + std::to_string(m) + "]", s.owner(), spec,
      [base](const StateId& x, Mode mm, uint64_t t) { return base.act(x, mm, t); },
      [base](const StateId& x, const ActionProfile& ap, Mode mm, uint64_t t) { return base.update(x, ap, mm, t); },
      s.deterministic());
  out.forced_transparent = s.forced_transparent;
  return out;
}

Strategy first_choice(Player p) {
  return Strategy::memoryless("first-choice", p, [](const StateId&) { return Mix::dirac(0); }, true);
}

// Remembers i when the play passes s'_i.
Mix remember_prime(const StateId& s, const ActionProfile& ap, Mode m) {
  if (ap.next && ap.next->tag == Tag::SPrime) return Mix::dirac(Mode(ap.next->p(0)));
  (void)s;
  return Mix::dirac(m);
}

}  // namespace

GamePtr conc_optmax() { return std::make_shared<ConcOptMax>(); }
GamePtr infbranch_optmin() { return std::make_shared<InfBranchOptMin>(); }

Strategy opt_max_conc_optmax() {
  MemorySpec spec;
  spec.mode_count = std::nullopt;
  return Strategy(
      "opt-max-conc-optmax", Player::Max, spec,
      [](const StateId& s, Mode m, uint64_t) {
        if (s.tag != Tag::SDoublePrime) return Mix::dirac(0);
        return Mix::dirac(uint64_t(s.p(0)) < m ? 0 : 1);
      },
      [](const StateId& s, const ActionProfile& ap, Mode m, uint64_t) { return remember_prime(s, ap, m); }, true);
}

Strategy opt_min_infbranch() {
  MemorySpec spec;
  spec.mode_count = std::nullopt;
  return Strategy(
      "opt-min-infbranch", Player::Min, spec,
      [](const StateId& s, Mode m, uint64_t) {
        if (s.tag != Tag::U) return Mix::dirac(0);
        return Mix::dirac(m >= 1 ? m - 1 : 0);
      },
      [](const StateId& s, const ActionProfile& ap, Mode m, uint64_t) { return remember_prime(s, ap, m); }, true);
}

ExploitResult exploit_fr(const Game& game, const Strategy& fr) {
  if (!fr.spec().mode_count) throw std::invalid_argument("exploit_fr: opponent memory is unbounded");
  if (fr.spec().uses_step_counter) throw std::invalid_argument("exploit_fr: opponent reads the step counter");
  const uint64_t modes = *fr.spec().mode_count;
  ExploitResult res;
  SweepOptions so;
  so.tail_budget = 1e-15;

  if (game.name() == "conc_optmax") {
    if (fr.owner() != Player::Max) throw std::invalid_argument("exploit_fr: conc_optmax needs a Maximizer opponent");
    // X(m): only Maximizer moves from s''_1. Plays still alive at the horizon count as wins.
    auto dummy = first_choice(Player::Min);
    res.Y = 0;
    for (Mode m = 0; m < modes; ++m) {
      auto est = forward_reach_exact(game, with_initial_mode(fr, m), dummy, s_dprime(1), 4096, so);
      res.X.push_back(est.interval.hi);
      res.Y = std::max(res.Y, est.interval.hi);
    }
    for (int64_t i = 1; i <= 60; ++i) {
      double q = 1 - std::ldexp(1.0, -int(i));
      if (res.Y < q - 1e-9) {  // a tie would leave no margin
        res.i = i;
        break;
      }
    }
    if (res.i == 0) throw std::runtime_error("exploit_fr: no index beats Y = " + std::to_string(res.Y));
    const int64_t i = res.i;
    res.margin = std::ldexp(1.0, -int(i)) * (1 - std::ldexp(1.0, -int(i)) - res.Y);
    res.bound = 2.0 / 3.0 - res.margin;
    res.strategy = Strategy::memoryless(
        "exploit-fr(i=" + std::to_string(i) + ")", Player::Min,
        [i](const StateId& s) { return Mix::dirac(s.tag == Tag::SPrime && s.p(0) == i ? 1 : 0); }, true);
    return res;
  }

  if (game.name() == "infbranch_optmin") {
    if (fr.owner() != Player::Min) throw std::invalid_argument("exploit_fr: infbranch_optmin needs a Minimizer opponent");
    auto dummy = first_choice(Player::Max);
    res.Y = 1;
    for (Mode m = 0; m < modes; ++m) {
      auto est = forward_reach_exact(game, dummy, with_initial_mode(fr, m), u(), 8, so);
      res.X.push_back(est.interval.lo);
      res.Y = std::min(res.Y, est.interval.lo);
    }
    if (!(res.Y > 0)) throw std::runtime_error("exploit_fr: some mode holds u to 0");
    for (int64_t i = 1; i <= 1000; ++i)
      if (std::ldexp(1.0, -int(i)) < res.Y / 2 - 1e-9) {
        res.i = i;
        break;
      }
    if (res.i == 0) throw std::runtime_error("exploit_fr: Y too small");
    const int64_t i = res.i;
    double e = std::ldexp(1.0, -int(i));
    res.margin = (0.5 + e) * res.Y - e;
    res.bound = 0.5 + res.margin;
    res.strategy = Strategy::memoryless(
        "exploit-fr(i=" + std::to_string(i) + ")", Player::Max,
        [i](const StateId& s) { return Mix::dirac(s.tag == Tag::S0 ? uint64_t(i - 1) : 0); }, true);
    return res;
  }
  throw std::invalid_argument("exploit_fr: unsupported game " + game.name());
}

}  // namespace cg::catalog
