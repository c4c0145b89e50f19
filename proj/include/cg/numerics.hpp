#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cg {

inline constexpr double kMassTol = 1e-12;
inline constexpr double kSolverTol = 1e-9;

// Closed bracket [lo, hi] inside [0, 1].
struct ValueInterval {
  double lo = 0.0;
  double hi = 1.0;

  ValueInterval() = default;
  // Clamps tiny rounding excursions; throws on a genuinely inverted bracket.
  ValueInterval(double l, double h);
  static ValueInterval point(double v) { return {v, v}; }

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x, double tol = 0.0) const { return lo - tol <= x && x <= hi + tol; }
  // Intersection; throws if disjoint beyond tol.
  ValueInterval meet(const ValueInterval& o, double tol = 1e-9) const;

  ValueInterval scale(double c) const;  // c in [0,1]
  ValueInterval complement() const;
  static ValueInterval min(const ValueInterval& a, const ValueInterval& b);
  static ValueInterval max(const ValueInterval& a, const ValueInterval& b);
  // w*a + (1-w)*b, w in [0,1]
  static ValueInterval convex(double w, const ValueInterval& a, const ValueInterval& b);
  std::string str() const;
};

struct WeierstrassResult {
  double product;
  double bound;
};
// prod (1 - a_k) and the bound 1/(1 + sum a_k).
WeierstrassResult weierstrass_bound(const std::vector<double>& a);

// A sequence a_n (n >= first) with optional analytic certificates.
struct SequenceOracle {
  std::function<double(uint64_t)> a;
  uint64_t first = 0;
  // Upper bound on sum_{k >= n} a_k; certifies summability.
  std::function<double(uint64_t)> tail_sum;
  // Lower bound L(n) <= sum_{first <= k < n} a_k with L(n) -> infinity; certifies divergence.
  std::function<double(uint64_t)> partial_lower;
};

enum class ProductClass { ConvergesPositive, DivergesToZero, Undecided };
std::string product_class_name(ProductClass c);

// Classifies prod (1 - a_n) from the certificates alone. Certificates are
// spot-checked against the first n_max terms; a certificate contradicted by the
// numbers yields Undecided.
ProductClass product_positive(const SequenceOracle& s, uint64_t n_max);

// Oracle for a positive product prod a_n: `neglog_tail(N)` bounds sum_{n >= N} -ln a_n.
struct ProductOracle {
  std::function<double(uint64_t)> a;
  std::function<double(uint64_t)> neglog_tail;
};

// Smallest N with neglog_tail(N) <= -ln(1 - eps), so that prod_{n >= N} a_n >= 1 - eps.
uint64_t tail_product_index(const ProductOracle& o, double eps, uint64_t n_limit = uint64_t(1) << 40);

// sum_{k >= x} 1/(k+1)^2 (trigamma(x+1)).
double inv_square_tail(uint64_t x);

// Wilson score interval for k successes out of n at the given two-sided confidence.
ValueInterval wilson_interval(uint64_t k, uint64_t n, double confidence);

}  // namespace cg
