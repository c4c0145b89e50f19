#include <atomic>
#include <cstdlib>
#include <random>
#include <thread>

#include "cg/engine.hpp"

namespace cg {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t draw(const Mix& m, std::mt19937_64& rng) {
  if (m.items.size() == 1) return m.items[0].first;
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double c = 0.0;
  for (const auto& [k, p] : m.items) {
    c += p;
    if (u < c) return k;
  }
  return m.items.back().first;
}

// Samples a successor; nullopt when the sample falls past the enumeration budget.
std::optional<StateId> draw(const Dist<StateId>& d, std::mt19937_64& rng, uint64_t max_items) {
  if (d.is_finite() && d.size() == 1) return d.items()[0].first;
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double c = 0.0;
  if (d.is_finite()) {
    for (const auto& [s, p] : d.items()) {
      c += p.v;
      if (u < c) return s;
    }
    return d.items().back().first;
  }
  for (uint64_t k = 0; k < max_items; ++k) {
    auto [s, p] = d.at(k);
    c += p.v;
    if (u < c) return s;
  }
  return std::nullopt;
}

bool run_episode(const Game& game, const Strategy& sigma, const Strategy& pi, const StateId& start, uint64_t horizon,
                 std::mt19937_64& rng, const McOptions& opts, bool transparent) {
  StateId s = start;
  Mode ma = sigma.spec().initial_mode, mb = pi.spec().initial_mode;
  uint64_t t = 0;
  while (true) {
    if (game.is_target(s)) return true;
    if (t >= horizon) return false;
    NodeKind kind = game.kind(s);
    if (kind == NodeKind::Random && transparent) {
      if (auto sk = game.skip_forced(s, horizon - t); sk && sk->second > 0) {
        s = sk->first;
        t += sk->second;
        continue;
      }
    }
    uint64_t a = Strategy::acts_at(Player::Max, kind) ? draw(sigma.act(s, ma, t), rng) : 0;
    uint64_t b = Strategy::acts_at(Player::Min, kind) ? draw(pi.act(s, mb, t), rng) : 0;
    auto next = draw(game.transition(s, a, b), rng, opts.max_enumeration);
    if (!next) return false;
    ActionProfile ap{a, b, &*next};
    Mode na = sigma.has_update() ? draw(sigma.update(s, ap, ma, t), rng) : ma;
    Mode nb = pi.has_update() ? draw(pi.update(s, ap, mb, t), rng) : mb;
    ma = na;
    mb = nb;
    s = std::move(*next);
    ++t;
  }
}

}  // namespace

uint64_t episode_seed(uint64_t seed, uint64_t episode) { return splitmix64(splitmix64(seed) ^ episode); }

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CG_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, unsigned(cap));
  }
  return n;
}

ReachEstimate simulate_mc(const Game& game, const Strategy& sigma, const Strategy& pi, const StateId& start,
                          uint64_t horizon, uint64_t episodes, uint64_t seed, double confidence,
                          const McOptions& opts) {
  if (episodes == 0) throw std::invalid_argument("simulate_mc: episodes must be >= 1");
  const bool transparent = opts.skip_forced && sigma.forced_transparent && pi.forced_transparent;
  unsigned nt = opts.threads ? opts.threads : worker_threads();
  nt = unsigned(std::min<uint64_t>(nt, episodes));
  std::vector<uint64_t> hits(nt, 0);
  auto work = [&](unsigned w) {
    // Strided assignment; the total is a sum of per-episode outcomes and so
    // does not depend on the thread count.
    for (uint64_t e = w; e < episodes; e += nt) {
      std::mt19937_64 rng(episode_seed(seed, e));
      hits[w] += run_episode(game, sigma, pi, start, horizon, rng, opts, transparent);
    }
  };
  if (nt == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  uint64_t k = 0;
  for (auto h : hits) k += h;
  ReachEstimate est;
  est.method = EstimateMethod::MonteCarlo;
  est.horizon = horizon;
  est.episodes = episodes;
  est.seed = seed;
  est.absorbed = double(k) / double(episodes);
  est.interval = wilson_interval(k, episodes, confidence);
  return est;
}

}  // namespace cg
