#include <algorithm>
#include <cmath>
#include <cstdio>

#include "catalog_internal.hpp"

namespace cg::catalog {

using namespace detail;

namespace {

// Rules are only consulted at the owner's nodes, so c_i here is a concurrent node.
bool at_concurrent_c(const StateId& s) { return is_c(s); }

// Chain length chosen by the turn-based entry strategy at row i.
int64_t bm_chain(int64_t x, int64_t N, int64_t i) {
  int64_t n = x + N - i;
  // Rows above x+N are unreachable from c_x; stop at once there.
  if (n < 0) return 1;
  return (n + 1) * (n + 1);
}

// Smallest t >= t0 with pred(t), by doubling then bisection; pred must be
// monotone from t0 on.
template <class Pred>
uint64_t first_time(uint64_t t0, Pred pred) {
  if (pred(t0)) return t0;
  uint64_t lo = t0, step = 1, hi = t0;
  const uint64_t cap = uint64_t(1) << 62;
  while (true) {
    hi = lo + step;
    if (hi >= cap) return cap;
    if (pred(hi)) break;
    lo = hi;
    step *= 2;
  }
  while (hi - lo > 1) {
    uint64_t mid = lo + (hi - lo) / 2;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

Strategy max_bm_strategy(int64_t x, int64_t N, Form form) {
  if (x < 0 || N < 0) throw std::invalid_argument("max_bm_strategy: x and N must be >= 0");
  std::string name = "max-bm(" + std::to_string(x) + "," + std::to_string(N) + ")";
  if (form == Form::Concurrent) {
    auto st = Strategy::memoryless(
        name, Player::Max,
        [x, N](const StateId& s) {
          if (!at_concurrent_c(s)) return Mix::dirac(0);
          int64_t n = x + N - s.p(0);
          if (n < 0) return Mix::dirac(0);
          double p = 1.0 / (double(n + 1) * double(n + 1));
          return Mix::bernoulli(1, 0, p);
        },
        false);
    st.f_of_i = [x, N](int64_t i) {
      int64_t n = x + N - i;
      return n < 0 ? 0.0 : 1.0 / (double(n + 1) * double(n + 1));
    };
    return st;
  }
  return Strategy::memoryless(
      name + "|tb", Player::Max,
      [x, N](const StateId& s) {
        if (s.tag != Tag::Cij) return Mix::dirac(0);
        return Mix::dirac(s.p(1) < bm_chain(x, N, s.p(0)) ? 1 : 0);
      },
      true);
}

Strategy min_fair_coin() {
  return Strategy::memoryless(
      "min-fair-coin", Player::Min,
      [](const StateId& s) {
        if (at_concurrent_c(s) || s.tag == Tag::D) return Mix::bernoulli(0, 1, 0.5);
        return Mix::dirac(0);
      },
      false);
}

Strategy min_always(uint64_t action) {
  if (action > 1) throw std::invalid_argument("min_always: action must be 0 or 1");
  return Strategy::memoryless(
      "min-always(" + std::to_string(action) + ")", Player::Min,
      [action](const StateId& s) { return Mix::dirac(at_concurrent_c(s) || s.tag == Tag::D ? action : 0); }, true);
}

RateFn inv_square_rate() {
  RateFn r;
  r.name = "1/(k+1)^2";
  r.f = [](int64_t k) { return 1.0 / (double(k + 1) * double(k + 1)); };
  r.certificate.a = [](uint64_t k) { return 1.0 / (double(k + 1) * double(k + 1)); };
  r.certificate.first = 1;
  r.certificate.tail_sum = [](uint64_t n) { return inv_square_tail(n); };
  return r;
}

RateFn constant_rate(double cst) {
  if (!(cst > 0 && cst <= 1)) throw std::invalid_argument("constant_rate: value outside (0,1]");
  RateFn r;
  char buf[32];
  std::snprintf(buf, sizeof buf, "const(%g)", cst);
  r.name = buf;
  r.f = [cst](int64_t) { return cst; };
  r.certificate.a = [cst](uint64_t) { return cst; };
  r.certificate.first = 1;
  r.certificate.partial_lower = [cst](uint64_t n) { return n >= 1 ? cst * double(n - 1) : 0.0; };
  return r;
}

Strategy mr_from_f(const RateFn& rate) {
  auto f = rate.f;
  auto st = Strategy::memoryless(
      "mr(" + rate.name + ")", Player::Max,
      [f](const StateId& s) { return at_concurrent_c(s) ? Mix::bernoulli(1, 0, f(s.p(0))) : Mix::dirac(0); }, false);
  st.f_of_i = f;
  st.rate_certificate = rate.certificate;
  return st;
}

Strategy hazard_max(const HazardSpec& spec) {
  auto f = spec.f;
  auto J = spec.J;
  auto rule = [f, J](const StateId& s, uint64_t t) {
    if (s.tag != Tag::Cij) return Mix::dirac(0);
    int64_t i = s.p(0), j = s.p(1), len = J(i);
    if (j >= len) return Mix::dirac(0);
    if (j > 1) return Mix::dirac(1);
    // At c_{i,1}; c_i was entered one step earlier.
    double inv = 1.0 / double(len);
    double a = (f(i, t == 0 ? 0 : t - 1) - inv) / (1.0 - inv);
    return Mix::bernoulli(0, 1, std::clamp(a, 0.0, 1.0));
  };
  if (spec.markov) return Strategy::markov(spec.name, Player::Max, rule, false);
  auto st = Strategy::memoryless(spec.name, Player::Max, [rule](const StateId& s) { return rule(s, 0); }, false);
  st.f_of_i = [f](int64_t i) { return f(i, 0); };
  return st;
}

MarkovExample markov_summable_example() {
  MarkovExample ex;
  auto fl = [](int64_t i) { return 1.0 / (double(i + 1) * double(i + 1)); };
  auto fat = [fl](int64_t i, uint64_t t) { return fl(i) * (1.0 + 1.0 / (double(t) + 1.0)); };
  ex.spec = {"markov-summable", fat, [](int64_t i) { return (i + 2) * (i + 2); }, true};
  ex.strategy = hazard_max(ex.spec);
  ex.sum_class = ProductClass::ConvergesPositive;
  auto& o = ex.oracle;
  o.f_limit = fl;
  o.f_at = fat;
  o.f_floor = fl;
  o.witness_ge = [](int64_t, double, uint64_t t0) { return t0; };
  o.witness_le = [fl, fat](int64_t i, double eps, uint64_t t0) {
    return first_time(t0, [&](uint64_t t) { return fat(i, t) <= fl(i) + eps; });
  };
  o.limit_series = inv_square_rate().certificate;
  return ex;
}

MarkovExample markov_divergent_example() {
  MarkovExample ex;
  auto fl = [](int64_t i) { return std::min(1.0, 1.0 / double(i)); };
  auto fat = [](int64_t i, uint64_t t) { return std::min(1.0, 1.0 / double(i) + 1.0 / (double(t) + 1.0)); };
  ex.spec = {"markov-divergent", fat, [](int64_t i) { return i + 1; }, true};
  ex.strategy = hazard_max(ex.spec);
  ex.sum_class = ProductClass::DivergesToZero;
  auto& o = ex.oracle;
  o.f_limit = fl;
  o.f_at = fat;
  o.f_floor = fl;
  o.witness_ge = [](int64_t, double, uint64_t t0) { return t0; };
  o.witness_le = [fl, fat](int64_t i, double eps, uint64_t t0) {
    return first_time(t0, [&](uint64_t t) { return fat(i, t) <= fl(i) + eps; });
  };
  o.limit_series.a = [fl](uint64_t n) { return fl(int64_t(n)); };
  o.limit_series.first = 1;
  // H_{n-1} >= ln n.
  o.limit_series.partial_lower = [](uint64_t n) { return n >= 1 ? std::log(double(n)) : 0.0; };
  return ex;
}

Strategy mr_hazard(const RateFn& rate, std::function<int64_t(int64_t)> J) {
  auto f = rate.f;
  HazardSpec spec{"mr-hazard(" + rate.name + ")", [f](int64_t i, uint64_t) { return f(i); }, std::move(J), false};
  auto st = hazard_max(spec);
  st.rate_certificate = rate.certificate;
  return st;
}

}  // namespace cg::catalog
