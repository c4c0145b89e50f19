#include <cmath>
#include <cstdio>

#include "catalog_internal.hpp"

namespace cg::catalog {

using namespace detail;

namespace {

// Outcome of the concurrent Big Match step at c_i.
enum class BmMove { Down, Up, Lose, Resolve };
BmMove bm_move(uint64_t a, uint64_t b) {
  if (a == 0) return b == 0 ? BmMove::Down : BmMove::Up;
  return b == 0 ? BmMove::Lose : BmMove::Resolve;
}

// Over-approximation of the game beyond the window top: Minimizer keeps
// playing action 1 with probability q. From c_m either Maximizer plays 1 at
// once (win with q) or he waits; with r = (1-q)/q the probability that the
// walk ever comes back down one level (an upward-biased walk), and each stop
// taken above the window wins with probability q. Maximizer's supremum over
// plays from c_m is therefore max(q, r v(c_{m-1}) + (1-r) q).
std::vector<TailCertificate> return_gadgets(int64_t radius, int64_t top, double qshift_base) {
  std::vector<TailCertificate> out;
  for (double k : {0.5, 1.0, 2.0}) {
    double q = 0.5 + k / qshift_base;
    double r = (1 - q) / q;
    char buf[64];
    std::snprintf(buf, sizeof buf, "return-gadget(q=%.5f)", q);
    TailCertificate tc;
    tc.name = buf;
    tc.gadget = [q, r, top](const StateId& exit) -> std::optional<std::vector<GadgetOption>> {
      if (!is_c(exit) || exit.p(0) != top + 1 || !exit.nest.empty()) return std::nullopt;
      GadgetOption stop{{GadgetOutcome::Win, {}, q}, {GadgetOutcome::Lose, {}, 1 - q}};
      GadgetOption back{{GadgetOutcome::State, c(top), r},
                        {GadgetOutcome::Win, {}, (1 - r) * q},
                        {GadgetOutcome::Lose, {}, (1 - r) * (1 - q)}};
      return std::vector<GadgetOption>{stop, back};
    };
    out.push_back(std::move(tc));
  }
  (void)radius;
  return out;
}

class BigMatchN final : public Game {
 public:
  std::string name() const override { return "big_match_N"; }
  NodeKind kind(const StateId& s) const override {
    check(s);
    if (s.tag == Tag::Lose || s.p(0) == 0) return NodeKind::Random;
    return NodeKind::Concurrent;
  }
  bool is_target(const StateId& s) const override { return is_c(s) && s.nest.empty() && s.p(0) == 0; }
  Count num_actions(const StateId& s, Player) const override { return kind(s) == NodeKind::Concurrent ? 2 : 1; }
  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    if (kind(s) == NodeKind::Random) return Dist<StateId>::dirac(s);
    int64_t i = s.p(0);
    switch (bm_move(a, b)) {
      case BmMove::Down: return Dist<StateId>::dirac(c(i - 1));
      case BmMove::Up: return Dist<StateId>::dirac(c(i + 1));
      case BmMove::Lose: return Dist<StateId>::dirac(lose());
      case BmMove::Resolve: break;
    }
    return Dist<StateId>::dirac(c(0));
  }
  std::vector<Family> families() const override { return {index_family(Tag::C, 0), single_family(lose(), 3)}; }
  std::optional<StateId> start_hint() const override { return c(1); }
  std::vector<TailCertificate> tail_certificates(int64_t radius) const override {
    return return_gadgets(radius, radius, 2.0 * double(radius) + 4.0);
  }

 private:
  void check(const StateId& s) const {
    if (s == lose()) return;
    if (!is_c(s) || !s.nest.empty() || s.p(0) < 0) bad_state(name(), s);
  }
};

class BigMatchZ final : public Game {
 public:
  explicit BigMatchZ(int64_t k) : k_(k) {}
  std::string name() const override { return "big_match_Z(" + std::to_string(k_) + ")"; }
  NodeKind kind(const StateId& s) const override {
    check(s);
    if (s.tag != Tag::C || s.p(0) == -k_) return NodeKind::Random;
    return NodeKind::Concurrent;
  }
  bool is_target(const StateId& s) const override {
    return s == win() || (is_c(s) && s.nest.empty() && s.p(0) == -k_);
  }
  Count num_actions(const StateId& s, Player) const override { return kind(s) == NodeKind::Concurrent ? 2 : 1; }
  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    if (kind(s) == NodeKind::Random) return Dist<StateId>::dirac(s);
    int64_t i = s.p(0);
    switch (bm_move(a, b)) {
      case BmMove::Down: return Dist<StateId>::dirac(c(i - 1));
      case BmMove::Up: return Dist<StateId>::dirac(c(i + 1));
      case BmMove::Lose: return Dist<StateId>::dirac(lose());
      case BmMove::Resolve: break;
    }
    return Dist<StateId>::dirac(win());
  }
  std::vector<Family> families() const override {
    int64_t k = k_;
    // Zigzag order on -k..k, then k+1, k+2, ... in order.
    Family cz;
    cz.tag = Tag::C;
    cz.arity = 1;
    cz.make = [k](const std::vector<uint64_t>& x) {
      int64_t n = int64_t(x[0]);
      return c(n <= 2 * k ? unzigzag(uint64_t(n)) : n - k);
    };
    cz.unmake = [k](const StateId& s) -> std::optional<std::vector<uint64_t>> {
      if (!is_c(s) || !s.nest.empty() || s.p(0) < -k) return std::nullopt;
      int64_t v = s.p(0);
      return std::vector<uint64_t>{v <= k ? zigzag(v) : uint64_t(v + k)};
    };
    return {cz, single_family(win(), 3), single_family(lose(), 4)};
  }
  std::optional<StateId> start_hint() const override { return c(0); }
  std::vector<TailCertificate> tail_certificates(int64_t radius) const override {
    // Above c_0 the game is the Big Match on N shifted by k_win.
    return return_gadgets(radius, radius, 2.0 * double(radius + k_) + 4.0);
  }

 private:
  void check(const StateId& s) const {
    if (s == lose() || s == win()) return;
    if (!is_c(s) || !s.nest.empty() || s.p(0) < -k_) bad_state(name(), s);
  }
  int64_t k_;
};

class TbSimple final : public Game {
 public:
  explicit TbSimple(std::function<double(int64_t, int)> p) : p_(std::move(p)) {}
  std::string name() const override { return "tb_big_match_simple"; }
  NodeKind kind(const StateId& s) const override {
    check(s);
    switch (s.tag) {
      case Tag::C: return s.p(0) == 0 ? NodeKind::Random : NodeKind::MaxTurn;
      case Tag::D: return NodeKind::MinTurn;
      default: return NodeKind::Random;
    }
  }
  bool is_target(const StateId& s) const override { return is_c(s) && s.nest.empty() && s.p(0) == 0; }
  Count num_actions(const StateId& s, Player pl) const override {
    NodeKind k = kind(s);
    if (k == NodeKind::MaxTurn && pl == Player::Max) return 2;
    if (k == NodeKind::MinTurn && pl == Player::Min) return 2;
    return 1;
  }
  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    check(s);
    switch (s.tag) {
      case Tag::C:
        if (s.p(0) == 0) return Dist<StateId>::dirac(s);
        return Dist<StateId>::dirac(d(s.p(0), int64_t(a)));
      case Tag::D: return Dist<StateId>::dirac(b == 0 ? r0(s.p(0), s.p(1)) : r1(s.p(0), s.p(1)));
      case Tag::R0: {
        Prob p = prob(s.p(0), int(s.p(1)));
        return two_way(lose(), p, c(s.p(0) - 1), p.complement());
      }
      case Tag::R1: {
        Prob p = prob(s.p(0), int(s.p(1)));
        return two_way(c(0), p, c(s.p(0) + 1), p.complement());
      }
      default: return Dist<StateId>::dirac(s);
    }
  }
  std::vector<Family> families() const override {
    auto im = [](Tag tag) {
      return plain_family(
          tag, 1, 0, [](const std::vector<uint64_t>& x) { return Params{int64_t(x[0] / 2) + 1, int64_t(x[0] % 2)}; },
          [](const Params& p) -> std::optional<std::vector<uint64_t>> {
            if (p.size() != 2 || p[0] < 1 || p[1] < 0 || p[1] > 1) return std::nullopt;
            return std::vector<uint64_t>{uint64_t(p[0] - 1) * 2 + uint64_t(p[1])};
          });
    };
    return {index_family(Tag::C, 0), im(Tag::D), im(Tag::R0), im(Tag::R1), single_family(lose(), 3)};
  }
  std::optional<StateId> start_hint() const override { return c(1); }

 private:
  Prob prob(int64_t i, int m) const {
    double p = p_(i, m);
    if (!(p > 0 && p <= 1)) throw std::domain_error("tb_big_match_simple: p outside (0,1]");
    return Prob(p);
  }
  void check(const StateId& s) const {
    if (s == lose()) return;
    if (!s.nest.empty()) bad_state(name(), s);
    if (s.tag == Tag::C && s.params.size() == 1 && s.p(0) >= 0) return;
    if ((s.tag == Tag::D || s.tag == Tag::R0 || s.tag == Tag::R1) && s.params.size() == 2 && s.p(0) >= 1 &&
        (s.p(1) == 0 || s.p(1) == 1))
      return;
    bad_state(name(), s);
  }
  std::function<double(int64_t, int)> p_;
};

}  // namespace

GamePtr big_match_N() { return std::make_shared<BigMatchN>(); }

GamePtr big_match_Z(int64_t k_win) {
  if (k_win < 1) throw std::invalid_argument("big_match_Z: k_win must be >= 1");
  return std::make_shared<BigMatchZ>(k_win);
}

GamePtr tb_big_match_simple(std::function<double(int64_t, int)> p) {
  if (!p) throw std::invalid_argument("tb_big_match_simple: missing probabilities");
  return std::make_shared<TbSimple>(std::move(p));
}

std::function<bool(const StateId&)> bm_window(int64_t lo, int64_t hi) {
  return [lo, hi](const StateId& s) {
    if (s.tag == Tag::Lose || s.tag == Tag::Win) return true;
    return is_c(s) && s.nest.empty() && s.p(0) >= lo && s.p(0) <= hi;
  };
}

}  // namespace cg::catalog
