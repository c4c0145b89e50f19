#include <limits>
#include <numeric>
#include <stdexcept>

#include "cg/prob.hpp"

namespace cg {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational::Rational(int64_t n, int64_t d) {
  if (d == 0) throw std::invalid_argument("Rational: zero denominator");
  auto r = from128(n, d);
  if (!r) throw std::overflow_error("Rational: unrepresentable");
  *this = *r;
}

std::optional<Rational> Rational::from128(__int128 n, __int128 d) {
  if (d == 0) return std::nullopt;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  constexpr __int128 lim = std::numeric_limits<int64_t>::max();
  if (n > lim || n < -lim || d > lim) return std::nullopt;
  Rational r;
  r.num_ = int64_t(n);
  r.den_ = int64_t(d);
  return r;
}

std::optional<Rational> Rational::add(const Rational& a, const Rational& b) {
  return from128(__int128(a.num_) * b.den_ + __int128(b.num_) * a.den_, __int128(a.den_) * b.den_);
}
std::optional<Rational> Rational::sub(const Rational& a, const Rational& b) {
  return from128(__int128(a.num_) * b.den_ - __int128(b.num_) * a.den_, __int128(a.den_) * b.den_);
}
std::optional<Rational> Rational::mul(const Rational& a, const Rational& b) {
  return from128(__int128(a.num_) * b.num_, __int128(a.den_) * b.den_);
}
std::optional<Rational> Rational::div(const Rational& a, const Rational& b) {
  if (b.num_ == 0) return std::nullopt;
  return from128(__int128(a.num_) * b.den_, __int128(a.den_) * b.num_);
}
std::optional<Rational> Rational::pow2_inv(int64_t k) {
  if (k < 0 || k > 62) return std::nullopt;
  return Rational(1, int64_t(1) << k);
}

bool operator<(const Rational& a, const Rational& b) {
  return __int128(a.num_) * b.den_ < __int128(b.num_) * a.den_;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Prob Prob::complement() const {
  Prob out(1.0 - v);
  if (exact) out.exact = Rational::sub(Rational(1), *exact);
  return out;
}

Prob operator*(const Prob& a, const Prob& b) {
  Prob out(a.v * b.v);
  if (a.exact && b.exact) out.exact = Rational::mul(*a.exact, *b.exact);
  return out;
}

Prob operator+(const Prob& a, const Prob& b) {
  Prob out(a.v + b.v);
  if (a.exact && b.exact) out.exact = Rational::add(*a.exact, *b.exact);
  return out;
}

}  // namespace cg
