#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cg {

// Exact rational with 64-bit numerator/denominator. Arithmetic is checked via
// 128-bit intermediates; an unrepresentable result yields std::nullopt from the
// checked operators so callers can drop to floating point.
class Rational {
 public:
  Rational() = default;
  Rational(int64_t n, int64_t d = 1);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  double to_double() const { return double(num_) / double(den_); }
  std::string str() const;

  static std::optional<Rational> add(const Rational& a, const Rational& b);
  static std::optional<Rational> sub(const Rational& a, const Rational& b);
  static std::optional<Rational> mul(const Rational& a, const Rational& b);
  static std::optional<Rational> div(const Rational& a, const Rational& b);
  // 2^{-k}; nullopt once the denominator overflows.
  static std::optional<Rational> pow2_inv(int64_t k);

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

 private:
  static std::optional<Rational> from128(__int128 n, __int128 d);
  int64_t num_ = 0;
  int64_t den_ = 1;
};

// Probability carried as a double plus, when the source formula is rational,
// the exact value.
struct Prob {
  double v = 0.0;
  std::optional<Rational> exact;

  Prob() = default;
  Prob(double x) : v(x) {}  // NOLINT: implicit on purpose
  Prob(const Rational& r) : v(r.to_double()), exact(r) {}
  static Prob ratio(int64_t n, int64_t d) { return Prob(Rational(n, d)); }

  Prob complement() const;
  friend Prob operator*(const Prob& a, const Prob& b);
  friend Prob operator+(const Prob& a, const Prob& b);
};

}  // namespace cg
