#include <map>
#include <stdexcept>
#include <unordered_map>

#include "cg/engine.hpp"

namespace cg {

namespace {

struct Key {
  StateId s;
  Mode a = 0, b = 0;
  friend bool operator==(const Key& x, const Key& y) { return x.a == y.a && x.b == y.b && x.s == y.s; }
};

struct KeyHash {
  size_t operator()(const Key& k) const noexcept {
    uint64_t h = hash_value(k.s);
    h ^= (k.a + 0x9e3779b97f4a7c15ULL) + (h << 6) + (h >> 2);
    h ^= (k.b + 0xbf58476d1ce4e5b9ULL) + (h << 6) + (h >> 2);
    return size_t(h);
  }
};

// Configurations of one time step in first-insertion order.
struct Bucket {
  std::vector<Key> keys;
  std::vector<double> mass;
  std::unordered_map<Key, size_t, KeyHash> index;

  void add(Key k, double m) {
    auto [it, fresh] = index.emplace(k, keys.size());
    if (fresh) {
      keys.push_back(std::move(k));
      mass.push_back(m);
    } else {
      mass[it->second] += m;
    }
  }
};

}  // namespace

ReachEstimate forward_reach_exact(const Game& game, const Strategy& sigma, const Strategy& pi, const StateId& start,
                                  uint64_t horizon, const SweepOptions& opts) {
  if (!opts.allow_unbounded_memory && (!sigma.spec().bounded() || !pi.spec().bounded()))
    throw std::invalid_argument("forward_reach_exact: unbounded-memory strategy " +
                                (sigma.spec().bounded() ? pi.name() : sigma.name()));
  if (opts.mass_floor < 0 || opts.mass_floor > 1e-3)
    throw std::invalid_argument("forward_reach_exact: mass_floor outside [0, 1e-3]");

  ReachEstimate est;
  est.method = EstimateMethod::ExactSweep;
  est.horizon = horizon;

  double absorbed = 0, pruned = 0, alive = 0, sunk = 0;
  double ret_lo = 0, ret_hi = 0, ret_mass = 0, alive_lo = 0, alive_hi = 0;
  std::map<uint64_t, Bucket> buckets;
  auto insert = [&](const StateId& s, Mode a, Mode b, uint64_t t, double m) {
    if (m <= 0) return;
    if (game.is_target(s)) {
      absorbed += m;
      return;
    }
    buckets[t].add(Key{s, a, b}, m);
  };
  insert(start, sigma.spec().initial_mode, pi.spec().initial_mode, 0, 1.0);

  const bool transparent = opts.skip_forced && sigma.forced_transparent && pi.forced_transparent;
  uint64_t processed = 0;
  while (!buckets.empty()) {
    auto node = buckets.extract(buckets.begin());
    uint64_t t = node.key();
    Bucket& bk = node.mapped();
    if (t >= horizon) {
      for (size_t k = 0; k < bk.keys.size(); ++k) {
        double m = bk.mass[k];
        alive += m;
        ValueInterval vb{0.0, 1.0};
        if (opts.alive_bound) vb = opts.alive_bound(WeightedConfig{bk.keys[k].s, bk.keys[k].a, bk.keys[k].b, t, m});
        alive_lo += m * vb.lo;
        alive_hi += m * vb.hi;
      }
      continue;
    }
    for (size_t k = 0; k < bk.keys.size(); ++k) {
      const Key& key = bk.keys[k];
      double m = bk.mass[k];
      if (m < opts.mass_floor) {
        pruned += m;
        continue;
      }
      if (++processed > opts.max_configs) throw std::runtime_error("forward_reach_exact: configuration budget exceeded");
      if (opts.retire) {
        if (auto r = opts.retire(WeightedConfig{key.s, key.a, key.b, t, m})) {
          ret_mass += m;
          ret_lo += m * r->lo;
          ret_hi += m * r->hi;
          continue;
        }
      }
      const StateId& s = key.s;
      NodeKind kind = game.kind(s);
      if (kind == NodeKind::Random && transparent) {
        if (auto sk = game.skip_forced(s, horizon - t); sk && sk->second > 0) {
          insert(sk->first, key.a, key.b, t + sk->second, m);
          continue;
        }
      }
      if (kind == NodeKind::Random) {
        // A non-target random self-loop never reaches the target.
        auto d = game.transition(s, 0, 0);
        if (d.is_finite() && d.size() == 1 && d.items()[0].first == s) {
          sunk += m;
          continue;
        }
      }
      Mix ma = Strategy::acts_at(Player::Max, kind) ? sigma.act(s, key.a, t) : Mix::dirac(0);
      Mix mb = Strategy::acts_at(Player::Min, kind) ? pi.act(s, key.b, t) : Mix::dirac(0);
      for (const auto& [a, pa] : ma.items) {
        for (const auto& [b, pb] : mb.items) {
          double w = m * pa * pb;
          if (w <= 0) continue;
          auto d = game.transition(s, a, b);
          auto [n, tail] = d.for_each(
              [&](const StateId& nx, double p) {
                if (p <= 0) return;
                ActionProfile ap{a, b, &nx};
                Mix ua = sigma.update(s, ap, key.a, t);
                Mix ub = pi.update(s, ap, key.b, t);
                for (const auto& [x, px] : ua.items)
                  for (const auto& [y, py] : ub.items) insert(nx, x, y, t + 1, w * p * px * py);
              },
              opts.tail_budget);
          (void)n;
          if (!d.is_finite()) {
            if (tail > opts.tail_budget && tail > 1e-9)
              throw std::runtime_error("forward_reach_exact: support budget exhausted at " + encode(s));
            pruned += w * tail;
          }
        }
      }
    }
    if (opts.record_trace) est.trace.emplace_back(t, absorbed);
  }

  est.absorbed = absorbed;
  est.pruned_mass = pruned;
  est.alive_mass = alive;
  est.configs = processed;
  est.mass_error = std::abs(absorbed + alive + pruned + ret_mass + sunk - 1.0);
  double lo = absorbed + ret_lo + alive_lo;
  double hi = absorbed + ret_hi + alive_hi + pruned;
  est.interval = ValueInterval(std::min(lo, 1.0), std::min(std::max(hi, lo), 1.0));
  return est;
}

ReachEstimate forward_reach_exact(const Game& game, const Strategy& sigma, const Strategy& pi, const StateId& start,
                                  uint64_t horizon, double mass_floor, const SweepOptions& opts) {
  SweepOptions o = opts;
  o.mass_floor = mass_floor;
  return forward_reach_exact(game, sigma, pi, start, horizon, o);
}

}  // namespace cg
