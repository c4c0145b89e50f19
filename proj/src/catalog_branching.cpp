#include <mutex>

#include "catalog_internal.hpp"

namespace cg::catalog {

using namespace detail;

StateId in_copy(const StateId& s, const std::vector<int64_t>& path) {
  StateId out = s;
  Nest n(path.begin(), path.end());
  n.insert(n.end(), s.nest.begin(), s.nest.end());
  out.nest = std::move(n);
  return out;
}

namespace {

StateId with_nest(StateId s, const Nest& n) {
  s.nest = n;
  return s;
}

struct Shape {
  bool has_u = false;
  bool has_b = false;
  int levels = 1;
  bool combined = false;
};

// Families of the level-L game with nest paths relative to its root. The
// "copy" variant adds the win state that exists only inside a copy.
class FamilyCache {
 public:
  explicit FamilyCache(Shape sh) : sh_(sh) {}

  std::shared_ptr<const std::vector<Family>> top(int L) { return get(L, false); }
  std::shared_ptr<const std::vector<Family>> copy(int L) { return get(L, true); }

 private:
  std::shared_ptr<const std::vector<Family>> get(int L, bool as_copy) {
    {
      std::lock_guard<std::mutex> lk(mu_);
      auto& slot = as_copy ? copy_ : top_;
      if (size_t(L) < slot.size() && slot[L]) return slot[L];
    }
    auto built = std::make_shared<std::vector<Family>>(build(L, as_copy));
    std::lock_guard<std::mutex> lk(mu_);
    auto& slot = as_copy ? copy_ : top_;
    if (slot.size() <= size_t(L)) slot.resize(L + 1);
    if (!slot[L]) slot[L] = built;
    return slot[L];
  }

  std::vector<Family> build(int L, bool as_copy) {
    std::vector<Family> fs = {index_family(Tag::C, 0),      pair_family(Tag::Cij, 1, 1), pair_family(Tag::D, 1, 1),
                              pair_family(Tag::R0, 1, 1),   pair_family(Tag::R1, 1, 1)};
    if (sh_.has_u) fs.push_back(single_family(u(), 2));
    if (sh_.has_b) {
      fs.push_back(index_family(Tag::B, 0));
      fs.push_back(pair_family(Tag::Bij, 0, 1));
      fs.push_back(plain_family(
          Tag::Bijl, 3, 0,
          [](const std::vector<uint64_t>& x) {
            int64_t l = int64_t(x[2]) + 1;
            return Params{int64_t(x[0]), l + 1 + int64_t(x[1]), l};
          },
          [](const Params& p) -> std::optional<std::vector<uint64_t>> {
            if (p.size() != 3 || p[0] < 0 || p[2] < 1 || p[1] <= p[2]) return std::nullopt;
            return std::vector<uint64_t>{uint64_t(p[0]), uint64_t(p[1] - p[2] - 1), uint64_t(p[2] - 1)};
          }));
    }
    fs.push_back(single_family(lose(), 3));
    if (as_copy) fs.push_back(single_family(win(), 4));
    if (L >= 2) {
      auto sub = copy(L - 1);
      Family f;
      f.tag = Tag::Count_;
      f.arity = 2;
      f.make = [sub](const std::vector<uint64_t>& x) {
        return in_copy(canonical_state(*sub, x[1]), {int64_t(x[0]) + 1});
      };
      f.unmake = [sub](const StateId& s) -> std::optional<std::vector<uint64_t>> {
        if (s.nest.empty() || s.nest[0] < 1) return std::nullopt;
        StateId inner = s;
        inner.nest.erase(inner.nest.begin());
        auto k = canonical_index(*sub, inner);
        if (!k) return std::nullopt;
        return std::vector<uint64_t>{uint64_t(s.nest[0] - 1), *k};
      };
      fs.push_back(std::move(f));
    }
    return fs;
  }

  Shape sh_;
  std::mutex mu_;
  std::vector<std::shared_ptr<const std::vector<Family>>> top_, copy_;
};

// Turn-based Big Match and its infinitely branching extensions. A state's
// nest path locates its copy: in nested games [i1, i2, ...] descends through
// the copies entered at c_{i1}, c_{i2}, ...; the combined game prefixes the
// index k of G_k.
class BranchingGame final : public Game {
 public:
  BranchingGame(std::string name, Shape sh) : name_(std::move(name)), sh_(sh), fams_(std::make_shared<FamilyCache>(sh)) {}

  std::string name() const override { return name_; }

  NodeKind kind(const StateId& s) const override {
    auto lv = local(s);
    switch (s.tag) {
      case Tag::S0:
      case Tag::U:
      case Tag::B:
      case Tag::D: return NodeKind::MinTurn;
      case Tag::C:
        if (s.p(0) == 0) return (sh_.combined && lv.depth == 0) ? NodeKind::MaxTurn : NodeKind::Random;
        return lv.level == 1 ? NodeKind::MaxTurn : NodeKind::MinTurn;
      case Tag::Cij: return NodeKind::MaxTurn;
      default: return NodeKind::Random;
    }
  }

  bool is_target(const StateId& s) const override {
    if (sh_.combined) return s == f_state();
    return is_c(s) && s.nest.empty() && s.p(0) == 0;
  }

  Count num_actions(const StateId& s, Player p) const override {
    NodeKind k = kind(s);
    bool owner = (k == NodeKind::MaxTurn && p == Player::Max) || (k == NodeKind::MinTurn && p == Player::Min);
    if (!owner) return 1;
    switch (s.tag) {
      case Tag::S0:
      case Tag::U:
      case Tag::B: return std::nullopt;
      case Tag::C: return s.p(0) >= 1 && local(s).level >= 2 ? Count{} : Count{1};
      default: return 2;
    }
  }

  Dist<StateId> transition(const StateId& s, uint64_t a, uint64_t b) const override {
    auto lv = local(s);
    const Nest& n = s.nest;
    auto here = [&](StateId x) { return with_nest(std::move(x), n); };
    auto into = [&](int64_t i) { return here(sh_.has_b ? catalog::b(i) : c(i)); };
    auto det = [](StateId x) { return Dist<StateId>::dirac(std::move(x)); };
    switch (s.tag) {
      case Tag::S0: return det(with_nest(u(), Nest{int64_t(b) + 1}));
      case Tag::F: return det(s);
      case Tag::U: return det(into(int64_t(b)));
      case Tag::B: return det(here(bij(s.p(0), int64_t(b) + 1)));
      case Tag::Bij: return det(s.p(1) == 1 ? here(c(s.p(0))) : here(bijl(s.p(0), s.p(1), 1)));
      case Tag::Bijl:
        return det(s.p(2) + 1 == s.p(1) ? here(c(s.p(0))) : here(bijl(s.p(0), s.p(1), s.p(2) + 1)));
      case Tag::Lose: return det(sh_.has_u ? here(u()) : s);
      case Tag::Win: {
        Nest parent = n;
        int64_t i = parent.back();
        parent.pop_back();
        return det(with_nest(cij(i, 1), parent));
      }
      case Tag::C: {
        int64_t i = s.p(0);
        if (i == 0) {
          if (lv.depth > 0) return det(here(win()));
          return det(sh_.combined ? f_state() : s);
        }
        if (lv.level == 1) return det(here(cij(i, 1)));
        Nest p = n;
        p.push_back(i);
        StateId e = canonical_state(*fams_->copy(lv.level - 1), b);
        Nest full = p;
        full.insert(full.end(), e.nest.begin(), e.nest.end());
        return det(with_nest(std::move(e), full));
      }
      case Tag::Cij: return det(a == 0 ? here(d(s.p(0), s.p(1))) : here(cij(s.p(0), s.p(1) + 1)));
      case Tag::D: return det(b == 0 ? here(r0(s.p(0), s.p(1))) : here(r1(s.p(0), s.p(1))));
      case Tag::R0: {
        int64_t j = s.p(1);
        return two_way(here(lose()), Prob::ratio(1, j), into(s.p(0) - 1), Prob::ratio(j - 1, j));
      }
      case Tag::R1: {
        int64_t j = s.p(1);
        return two_way(into(0), Prob::ratio(1, j), into(s.p(0) + 1), Prob::ratio(j - 1, j));
      }
      default: bad_state(name_, s);
    }
  }

  std::vector<Family> families() const override {
    if (!sh_.combined) return *fams_->top(sh_.levels);
    auto cache = fams_;
    Family g;
    g.tag = Tag::Count_;
    g.arity = 2;
    g.make = [cache](const std::vector<uint64_t>& x) {
      int K = int(x[0]) + 1;
      return in_copy(canonical_state(*cache->top(K), x[1]), {K});
    };
    g.unmake = [cache](const StateId& s) -> std::optional<std::vector<uint64_t>> {
      if (s.nest.empty() || s.nest[0] < 1 || size_t(s.nest[0]) < s.nest.size()) return std::nullopt;
      StateId inner = s;
      inner.nest.erase(inner.nest.begin());
      auto k = canonical_index(*cache->top(int(s.nest[0])), inner);
      if (!k) return std::nullopt;
      return std::vector<uint64_t>{uint64_t(s.nest[0] - 1), *k};
    };
    return {single_family(s0(), 0), single_family(f_state(), 1), g};
  }

  std::optional<StateId> start_hint() const override {
    if (sh_.combined) return s0();
    if (sh_.has_u) return u();
    return c(1);
  }

  std::optional<std::pair<StateId, uint64_t>> skip_forced(const StateId& s, uint64_t max_steps) const override {
    if (max_steps == 0) return std::nullopt;
    int64_t i, j, l;
    if (s.tag == Tag::Bij && s.params.size() == 2) {
      i = s.p(0), j = s.p(1), l = 0;
    } else if (s.tag == Tag::Bijl && s.params.size() == 3) {
      i = s.p(0), j = s.p(1), l = s.p(2);
    } else {
      return std::nullopt;
    }
    uint64_t rest = uint64_t(j - l);
    if (rest <= max_steps) return std::make_pair(with_nest(c(i), s.nest), rest);
    return std::make_pair(with_nest(bijl(i, j, l + int64_t(max_steps)), s.nest), max_steps);
  }

 private:
  struct Local {
    int depth;  // copies below the root of the outermost game
    int level;  // level of the game the state lives in
  };
  Local local(const StateId& s) const {
    if (sh_.combined) {
      if (s.tag == Tag::S0 || s.tag == Tag::F) {
        if (!s.nest.empty() || !s.params.empty()) bad_state(name_, s);
        return {0, 0};
      }
      if (s.nest.empty() || s.nest[0] < 1) bad_state(name_, s);
      int K = int(s.nest[0]);
      int depth = int(s.nest.size()) - 1;
      return check(s, depth, K - depth, 1);
    }
    int depth = int(s.nest.size());
    return check(s, depth, sh_.levels - depth, 0);
  }

  Local check(const StateId& s, int depth, int level, size_t root) const {
    if (level < 1) bad_state(name_, s);
    for (size_t k = root; k < s.nest.size(); ++k)
      if (s.nest[k] < 1) bad_state(name_, s);
    const auto& p = s.params;
    bool ok = false;
    switch (s.tag) {
      case Tag::C: ok = p.size() == 1 && p[0] >= 0; break;
      case Tag::Cij:
      case Tag::D:
      case Tag::R0:
      case Tag::R1: ok = p.size() == 2 && p[0] >= 1 && p[1] >= 1; break;
      case Tag::U: ok = sh_.has_u && p.empty(); break;
      case Tag::B: ok = sh_.has_b && p.size() == 1 && p[0] >= 0; break;
      case Tag::Bij: ok = sh_.has_b && p.size() == 2 && p[0] >= 0 && p[1] >= 1; break;
      case Tag::Bijl: ok = sh_.has_b && p.size() == 3 && p[0] >= 0 && p[2] >= 1 && p[1] > p[2]; break;
      case Tag::Lose: ok = p.empty(); break;
      case Tag::Win: ok = p.empty() && depth >= 1; break;
      default: break;
    }
    if (!ok) bad_state(name_, s);
    return {depth, level};
  }

  std::string name_;
  Shape sh_;
  std::shared_ptr<FamilyCache> fams_;
};

}  // namespace

GamePtr tb_big_match_N() { return std::make_shared<BranchingGame>("tb_big_match_N", Shape{}); }

GamePtr inf_branch_no_mr() { return std::make_shared<BranchingGame>("inf_branch_no_mr", Shape{true, false, 1, false}); }

GamePtr inf_branch_no_markov() {
  return std::make_shared<BranchingGame>("inf_branch_no_markov", Shape{true, true, 1, false});
}

GamePtr nested(int k) {
  if (k < 1) throw std::invalid_argument("nested: k must be >= 1");
  if (k == 1) return inf_branch_no_markov();
  return std::make_shared<BranchingGame>("nested(" + std::to_string(k) + ")", Shape{true, true, k, false});
}

GamePtr combined() { return std::make_shared<BranchingGame>("combined", Shape{true, true, 1, true}); }

std::function<bool(const StateId&)> tb_window(int64_t hi, int64_t j_max) {
  return [hi, j_max](const StateId& s) {
    if (!s.nest.empty()) return false;
    switch (s.tag) {
      case Tag::Lose:
      case Tag::U: return true;
      case Tag::C:
      case Tag::B: return s.p(0) <= hi;
      case Tag::Cij:
      case Tag::D:
      case Tag::R0:
      case Tag::R1: return s.p(0) <= hi && s.p(1) <= j_max;
      case Tag::Bij:
      case Tag::Bijl: return s.p(0) <= hi && s.p(1) <= j_max;
      default: return false;
    }
  };
}

}  // namespace cg::catalog
