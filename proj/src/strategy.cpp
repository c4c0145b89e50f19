#include "cg/strategy.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace cg {

Strategy Strategy::memoryless(std::string name, Player owner, std::function<Mix(const StateId&)> f,
                              bool deterministic) {
  return Strategy(
      std::move(name), owner, MemorySpec{}, [f = std::move(f)](const StateId& s, Mode, uint64_t) { return f(s); },
      {}, deterministic);
}

Strategy Strategy::markov(std::string name, Player owner, std::function<Mix(const StateId&, uint64_t)> f,
                          bool deterministic) {
  MemorySpec spec;
  spec.uses_step_counter = true;
  return Strategy(
      std::move(name), owner, spec, [f = std::move(f)](const StateId& s, Mode, uint64_t t) { return f(s, t); }, {},
      deterministic);
}

namespace {

bool same_mix(const Mix& x, const Mix& y) {
  for (const auto& [k, p] : x.items)
    if (std::abs(y.prob(k) - p) > 1e-12) return false;
  for (const auto& [k, p] : y.items)
    if (std::abs(x.prob(k) - p) > 1e-12) return false;
  return true;
}

}  // namespace

ValidationReport validate(const Strategy& st, const Game& game, size_t sample_states, size_t sample_times) {
  ValidationReport rep;
  auto note = [&](const std::string& what, const StateId& s, Mode m, uint64_t t) {
    std::ostringstream os;
    os << st.name() << ": " << what << " at " << encode(s) << " mode " << m << " time " << t;
    rep.violations.push_back(os.str());
  };
  const auto& spec = st.spec();
  if (spec.mode_count && *spec.mode_count == 0) rep.violations.push_back(st.name() + ": zero modes");
  if (spec.mode_count && spec.initial_mode >= *spec.mode_count)
    rep.violations.push_back(st.name() + ": initial mode out of range");

  static const uint64_t kTimes[] = {0, 1, 7, 1000, 3, 50, 12345, 2, 99, 100000};
  size_t nt = std::max<size_t>(1, std::min<size_t>(sample_times, std::size(kTimes)));
  std::vector<Mode> modes{spec.initial_mode};
  uint64_t mc = spec.mode_count.value_or(4);
  for (Mode m = 0; m < std::min<uint64_t>(mc, 4); ++m)
    if (m != spec.initial_mode) modes.push_back(m);

  for (const auto& s : enumerate_states(game, sample_states)) {
    if (game.is_target(s)) continue;
    NodeKind k = game.kind(s);
    if (!Strategy::acts_at(st.owner(), k)) continue;
    Count legal = game.num_actions(s, st.owner());
    for (Mode m : modes) {
      std::optional<Mix> first;
      for (size_t ti = 0; ti < nt; ++ti) {
        uint64_t t = kTimes[ti];
        Mix mix = st.act(s, m, t);
        ++rep.checks;
        if (std::abs(mix.total() - 1.0) > 1e-12) note("act mass " + std::to_string(mix.total()), s, m, t);
        for (const auto& [a, p] : mix.items) {
          if (p < 0 || p > 1 + 1e-12) note("probability out of range", s, m, t);
          if (legal && a >= *legal) note("illegal action " + std::to_string(a), s, m, t);
        }
        if (st.deterministic() && !mix.is_dirac()) note("randomized act in deterministic strategy", s, m, t);
        if (!spec.uses_step_counter) {
          if (!first)
            first = mix;
          else if (!same_mix(*first, mix))
            note("act depends on time without step counter", s, m, t);
        }
        // Memory update: probe the first legal successor of the chosen action.
        if (!mix.items.empty()) {
          uint64_t a = mix.items[0].first;
          uint64_t ia = st.owner() == Player::Max ? a : 0;
          uint64_t ib = st.owner() == Player::Min ? a : 0;
          if (legal && a >= *legal) continue;
          auto d = game.transition(s, ia, ib);
          StateId next = d.at(0).first;
          ActionProfile ap{ia, ib, &next};
          Mix up = st.update(s, ap, m, t);
          if (std::abs(up.total() - 1.0) > 1e-12) note("update mass", s, m, t);
          for (const auto& [mm, p] : up.items) {
            (void)p;
            if (spec.mode_count && mm >= *spec.mode_count) note("update to mode " + std::to_string(mm), s, m, t);
          }
        }
      }
    }
  }
  return rep;
}

Strategy restrict_time_constant(const Strategy& st, uint64_t t) {
  Mode m0 = st.spec().initial_mode;
  auto base = st;
  Strategy out(
      st.name() + "@t=" + std::to_string(t), st.owner(), MemorySpec{},
      [base, m0, t](const StateId& s, Mode, uint64_t) { return base.act(s, m0, t); }, {}, st.deterministic());
  if (st.f_of_i && !st.spec().uses_step_counter) out.f_of_i = st.f_of_i;
  return out;
}

std::vector<std::string> check_oracle(const AccumulationOracle& o, size_t checks, uint64_t seed, int64_t max_i) {
  std::vector<std::string> bad;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> di(1, max_i);
  std::uniform_real_distribution<double> de(-6, -1);
  std::uniform_int_distribution<uint64_t> dt(0, 100000);
  for (size_t k = 0; k < checks; ++k) {
    int64_t i = di(rng);
    double eps = std::pow(10.0, de(rng));
    uint64_t t0 = dt(rng);
    double lim = o.f_limit(i);
    if (o.witness_le) {
      uint64_t t = o.witness_le(i, eps, t0);
      if (t < t0 || o.f_at(i, t) > lim + eps) bad.push_back("witness_le fails at i=" + std::to_string(i));
    }
    if (o.witness_ge) {
      uint64_t t = o.witness_ge(i, eps, t0);
      if (t < t0 || o.f_at(i, t) < lim - eps) bad.push_back("witness_ge fails at i=" + std::to_string(i));
    }
  }
  return bad;
}

}  // namespace cg
