#include "cg/numerics.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cg/kernels.hpp"

namespace cg {

ValueInterval::ValueInterval(double l, double h) {
  if (!(l <= h + 1e-9) || l < -1e-9 || h > 1 + 1e-9 || std::isnan(l) || std::isnan(h)) {
    std::ostringstream os;
    os << "ValueInterval: invalid [" << l << ", " << h << "]";
    throw std::invalid_argument(os.str());
  }
  lo = std::clamp(l, 0.0, 1.0);
  hi = std::clamp(h, 0.0, 1.0);
  if (lo > hi) lo = hi = 0.5 * (lo + hi);
}

ValueInterval ValueInterval::meet(const ValueInterval& o, double tol) const {
  double l = std::max(lo, o.lo), h = std::min(hi, o.hi);
  if (l > h + tol) throw std::logic_error("ValueInterval: disjoint brackets " + str() + " and " + o.str());
  if (l > h) l = h = 0.5 * (l + h);
  return {l, h};
}

ValueInterval ValueInterval::scale(double c) const {
  if (c < 0 || c > 1) throw std::invalid_argument("ValueInterval::scale: factor outside [0,1]");
  return {lo * c, hi * c};
}

ValueInterval ValueInterval::complement() const { return {1.0 - hi, 1.0 - lo}; }

ValueInterval ValueInterval::min(const ValueInterval& a, const ValueInterval& b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

ValueInterval ValueInterval::max(const ValueInterval& a, const ValueInterval& b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}

ValueInterval ValueInterval::convex(double w, const ValueInterval& a, const ValueInterval& b) {
  if (w < 0 || w > 1) throw std::invalid_argument("ValueInterval::convex: weight outside [0,1]");
  return {w * a.lo + (1 - w) * b.lo, w * a.hi + (1 - w) * b.hi};
}

std::string ValueInterval::str() const {
  std::ostringstream os;
  os.precision(10);
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

WeierstrassResult weierstrass_bound(const std::vector<double>& a) {
  for (double x : a)
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("weierstrass_bound: entry outside [0,1]");
  double s = kernels::sum(a.data(), a.size());
  return {kernels::prod_one_minus(a.data(), a.size()), 1.0 / (1.0 + s)};
}

std::string product_class_name(ProductClass c) {
  switch (c) {
    case ProductClass::ConvergesPositive:
      return "converges-positive";
    case ProductClass::DivergesToZero:
      return "diverges-to-zero";
    case ProductClass::Undecided:
      return "undecided";
  }
  return "?";
}

ProductClass product_positive(const SequenceOracle& s, uint64_t n_max) {
  if (!s.a) return ProductClass::Undecided;
  if (s.tail_sum && s.partial_lower) return ProductClass::Undecided;  // contradictory certificates
  // Spot checks on a bounded prefix; never used to decide by themselves.
  uint64_t n_check = std::min<uint64_t>(n_max, 4096);
  double partial = 0.0;
  for (uint64_t k = s.first; k < s.first + n_check; ++k) {
    double x = s.a(k);
    if (!(x >= 0.0 && x <= 1.0)) return ProductClass::Undecided;
    if (s.tail_sum && x >= 1.0) return ProductClass::Undecided;  // a factor of 0 makes the product 0
    partial += x;
    uint64_t n = k + 1;
    if (s.partial_lower && s.partial_lower(n) > partial * (1 + 1e-12) + 1e-12) return ProductClass::Undecided;
    if (s.tail_sum && (n - s.first) % 64 == 0) {
      // tail_sum(first) must dominate what we have already seen.
      if (s.tail_sum(s.first) + 1e-12 < partial) return ProductClass::Undecided;
    }
  }
  if (s.tail_sum) {
    double t = s.tail_sum(s.first);
    if (std::isfinite(t)) return ProductClass::ConvergesPositive;
    return ProductClass::Undecided;
  }
  if (s.partial_lower) return ProductClass::DivergesToZero;
  return ProductClass::Undecided;
}

uint64_t tail_product_index(const ProductOracle& o, double eps, uint64_t n_limit) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("tail_product_index: eps outside (0,1)");
  if (!o.neglog_tail) throw std::invalid_argument("tail_product_index: no positivity certificate");
  const double budget = -std::log1p(-eps);
  if (o.neglog_tail(0) <= budget) return 0;
  // neglog_tail is non-increasing: gallop, then bisect.
  uint64_t hi = 1;
  while (o.neglog_tail(hi) > budget) {
    if (hi >= n_limit) throw std::runtime_error("tail_product_index: certificate does not reach eps");
    hi *= 2;
  }
  uint64_t lo = hi / 2;
  while (lo + 1 < hi) {
    uint64_t mid = lo + (hi - lo) / 2;
    if (o.neglog_tail(mid) <= budget)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double inv_square_tail(uint64_t x) { return boost::math::trigamma(double(x) + 1.0); }

ValueInterval wilson_interval(uint64_t k, uint64_t n, double confidence) {
  if (n == 0) return {0.0, 1.0};
  boost::math::normal_distribution<double> nd;
  double z = boost::math::quantile(nd, 0.5 + confidence / 2);
  double p = double(k) / double(n);
  double z2n = z * z / double(n);
  double c = (p + z2n / 2) / (1 + z2n);
  double h = z * std::sqrt(p * (1 - p) / double(n) + z2n / (4 * double(n))) / (1 + z2n);
  double lo = k == 0 ? 0.0 : std::max(0.0, c - h);
  double hi = k == n ? 1.0 : std::min(1.0, c + h);
  return {lo, hi};
}

}  // namespace cg
