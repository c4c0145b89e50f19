#pragma once

#include <boost/container/small_vector.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "cg/prob.hpp"

namespace cg {

enum class DistKind { Finite, Countable };

// Probability distribution with either a finite support or a countable support
// given by a generator. Countable distributions carry an analytic bound on the
// mass not yet enumerated after n items.
template <class T>
class Dist {
 public:
  using Item = std::pair<T, Prob>;
  using Generator = std::function<Item(uint64_t)>;
  using TailBound = std::function<double(uint64_t)>;

  Dist() = default;

  static Dist dirac(T x) {
    Dist d;
    d.items_.emplace_back(std::move(x), Prob(Rational(1)));
    return d;
  }
  static Dist finite(boost::container::small_vector<Item, 2> items) {
    Dist d;
    d.items_ = std::move(items);
    return d;
  }
  static Dist countable(Generator gen, TailBound tail) {
    Dist d;
    d.kind_ = DistKind::Countable;
    d.gen_ = std::make_shared<Generator>(std::move(gen));
    d.tail_ = std::make_shared<TailBound>(std::move(tail));
    return d;
  }

  DistKind kind() const { return kind_; }
  bool is_finite() const { return kind_ == DistKind::Finite; }
  // Number of items for finite distributions.
  uint64_t size() const {
    if (!is_finite()) throw std::logic_error("Dist::size on countable distribution");
    return items_.size();
  }
  Item at(uint64_t k) const {
    if (is_finite()) return items_.at(k);
    return (*gen_)(k);
  }
  const boost::container::small_vector<Item, 2>& items() const { return items_; }

  // Upper bound on the mass outside the first n items.
  double tail_bound(uint64_t n) const {
    if (!is_finite()) return (*tail_)(n);
    if (n >= items_.size()) return 0.0;
    double s = 0.0;
    for (uint64_t k = 0; k < n; ++k) s += items_[k].second.v;
    return std::max(0.0, 1.0 - s);
  }

  // Visits items in order until the remaining tail is at most `budget` or
  // `max_items` have been produced. Returns (items visited, remaining tail bound).
  template <class F>
  std::pair<uint64_t, double> for_each(F&& f, double budget = 0.0, uint64_t max_items = 1u << 20) const {
    if (is_finite()) {
      for (const auto& it : items_) f(it.first, it.second.v);
      return {items_.size(), 0.0};
    }
    uint64_t n = 0;
    double tail = (*tail_)(0);
    while (tail > budget && n < max_items) {
      auto it = (*gen_)(n);
      f(it.first, it.second.v);
      ++n;
      tail = (*tail_)(n);
    }
    return {n, tail};
  }

  template <class U, class F>
  Dist<U> map(F&& fn) const {
    if (is_finite()) {
      boost::container::small_vector<typename Dist<U>::Item, 2> out;
      for (const auto& [x, p] : items_) out.emplace_back(fn(x), p);
      return Dist<U>::finite(std::move(out));
    }
    auto g = gen_;
    auto t = tail_;
    return Dist<U>::countable(
        [g, fn](uint64_t k) {
          auto [x, p] = (*g)(k);
          return typename Dist<U>::Item(fn(x), p);
        },
        [t](uint64_t n) { return (*t)(n); });
  }

 private:
  DistKind kind_ = DistKind::Finite;
  boost::container::small_vector<Item, 2> items_;
  std::shared_ptr<Generator> gen_;
  std::shared_ptr<TailBound> tail_;
};

// Small finite mixture over indices (actions, choices or memory modes), the
// return type of strategy rules.
struct Mix {
  boost::container::small_vector<std::pair<uint64_t, double>, 2> items;

  static Mix dirac(uint64_t k) {
    Mix m;
    m.items.emplace_back(k, 1.0);
    return m;
  }
  static Mix bernoulli(uint64_t yes, uint64_t no, double p_yes) {
    Mix m;
    if (p_yes >= 1.0) return dirac(yes);
    if (p_yes <= 0.0) return dirac(no);
    m.items.emplace_back(yes, p_yes);
    m.items.emplace_back(no, 1.0 - p_yes);
    return m;
  }
  void add(uint64_t k, double p) {
    if (p <= 0.0) return;
    for (auto& [x, q] : items)
      if (x == k) {
        q += p;
        return;
      }
    items.emplace_back(k, p);
  }
  double total() const {
    double s = 0.0;
    for (auto& it : items) s += it.second;
    return s;
  }
  bool is_dirac() const { return items.size() == 1 && std::abs(items[0].second - 1.0) <= 1e-12; }
  double prob(uint64_t k) const {
    for (auto& [x, q] : items)
      if (x == k) return q;
    return 0.0;
  }
};

}  // namespace cg
