#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "cg/numerics.hpp"

using namespace cg;

TEST_CASE("weierstrass bound: fixed cases") {
  auto r = weierstrass_bound({0.5, 0.5});
  CHECK(r.product == doctest::Approx(0.25));
  CHECK(r.bound == doctest::Approx(0.5));
  auto z = weierstrass_bound({0.0});
  CHECK(z.product == 1.0);
  CHECK(z.bound == 1.0);
  CHECK_THROWS(weierstrass_bound({0.2, 1.5}));
  CHECK_THROWS(weierstrass_bound({-0.1}));
}

TEST_CASE("weierstrass bound holds on 10^4 random sequences") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> len(0, 50);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> a(len(rng));
    // Mix dense and sparse sequences.
    double scale = u(rng) < 0.5 ? 1.0 : 0.05;
    for (auto& x : a) x = u(rng) * scale;
    auto r = weierstrass_bound(a);
    REQUIRE(r.product <= r.bound + 1e-12);
  }
}

TEST_CASE("product classification is certificate driven") {
  SequenceOracle sq;
  sq.a = [](uint64_t n) { return 1.0 / double((n + 1) * (n + 1)); };
  sq.first = 1;
  sq.tail_sum = [](uint64_t n) { return 1.0 / double(n); };
  CHECK(product_positive(sq, 1000) == ProductClass::ConvergesPositive);

  SequenceOracle harm;
  harm.a = [](uint64_t n) { return 1.0 / double(n + 1); };
  harm.first = 1;
  harm.partial_lower = [](uint64_t n) { return std::log(double(n + 1)) - std::log(2.0); };
  CHECK(product_positive(harm, 1000) == ProductClass::DivergesToZero);

  SequenceOracle opaque;
  opaque.a = harm.a;
  CHECK(product_positive(opaque, 1000000) == ProductClass::Undecided);

  // A tail certificate contradicted by the terms is not trusted.
  SequenceOracle liar = harm;
  liar.partial_lower = nullptr;
  liar.tail_sum = [](uint64_t) { return 0.5; };
  CHECK(product_positive(liar, 1000) == ProductClass::Undecided);
  // Both certificates at once is contradictory.
  SequenceOracle both = sq;
  both.partial_lower = harm.partial_lower;
  CHECK(product_positive(both, 100) == ProductClass::Undecided);
}

TEST_CASE("tail product index") {
  ProductOracle ones{[](uint64_t) { return 1.0; }, [](uint64_t) { return 0.0; }};
  CHECK(tail_product_index(ones, 0.3) == 0);

  // a_n = 1 - 2^{-n}; -ln(1 - x) <= 2x for x <= 1/2.
  ProductOracle geo{[](uint64_t n) { return 1 - std::ldexp(1.0, -int(n)); },
                    [](uint64_t n) { return n == 0 ? std::numeric_limits<double>::infinity() : std::ldexp(4.0, -int(n)); }};
  uint64_t N = tail_product_index(geo, 0.1);
  CHECK(N <= 10);
  double p = 1;
  for (uint64_t n = N; n <= 60; ++n) p *= geo.a(n);
  CHECK(p >= 0.9);

  // a_n = 1 - 1/(n+2)^2; -ln a_n <= 2/(n+2)^2 and sum_{n >= N} 1/(n+2)^2 <= 1/(N+1).
  ProductOracle sq{[](uint64_t n) { return 1 - 1.0 / double((n + 2) * (n + 2)); },
                   [](uint64_t n) { return 2.0 / double(n + 1); }};
  N = tail_product_index(sq, 0.5);
  p = 1;
  for (uint64_t n = N; n < N + 1000; ++n) p *= sq.a(n);
  CHECK(p >= 0.5);
  CHECK(N < 10);

  CHECK_THROWS(tail_product_index(sq, 0.0));
  CHECK_THROWS(tail_product_index(sq, 1.0));
  CHECK_THROWS(tail_product_index(ProductOracle{sq.a, nullptr}, 0.5));
  // A certificate that never reaches the budget is reported.
  ProductOracle stuck{sq.a, [](uint64_t) { return 1.0; }};
  CHECK_THROWS(tail_product_index(stuck, 0.1, 1 << 10));
}

TEST_CASE("inverse-square tail") {
  double direct = 0;
  for (uint64_t k = 3; k < 2000000; ++k) direct += 1.0 / double((k + 1) * (k + 1));
  CHECK(inv_square_tail(3) == doctest::Approx(direct).epsilon(1e-5));
  CHECK(inv_square_tail(0) == doctest::Approx(M_PI * M_PI / 6));
}

TEST_CASE("intervals: construction") {
  CHECK_THROWS(ValueInterval(0.6, 0.4));
  CHECK_THROWS(ValueInterval(-0.5, 0.4));
  CHECK_THROWS(ValueInterval(0.2, std::nan("")));
  ValueInterval v(-1e-12, 1 + 1e-12);
  CHECK(v.lo == 0.0);
  CHECK(v.hi == 1.0);
  CHECK(ValueInterval(0.2, 0.4).meet(ValueInterval(0.3, 0.9)).lo == doctest::Approx(0.3));
  CHECK_THROWS(ValueInterval(0.1, 0.2).meet(ValueInterval(0.5, 0.6)));
}

TEST_CASE("intervals: operations keep order and containment") {
  std::mt19937_64 rng(20240612);
  std::uniform_real_distribution<double> u(0, 1);
  auto draw = [&] {
    double a = u(rng), b = u(rng);
    double x = std::min(a, b) + (std::max(a, b) - std::min(a, b)) * u(rng);
    return std::make_pair(ValueInterval(std::min(a, b), std::max(a, b)), x);
  };
  auto ok = [](const ValueInterval& v) { return 0.0 <= v.lo && v.lo <= v.hi && v.hi <= 1.0; };
  for (int k = 0; k < 5000; ++k) {
    auto [A, x] = draw();
    auto [B, y] = draw();
    double c = u(rng), w = u(rng);
    auto s = A.scale(c), cm = A.complement(), mn = ValueInterval::min(A, B), mx = ValueInterval::max(A, B),
         cv = ValueInterval::convex(w, A, B);
    REQUIRE(ok(s));
    REQUIRE(ok(cm));
    REQUIRE(ok(mn));
    REQUIRE(ok(mx));
    REQUIRE(ok(cv));
    CHECK(s.contains(c * x, 1e-15));
    CHECK(cm.contains(1 - x, 1e-15));
    CHECK(mn.contains(std::min(x, y), 1e-15));
    CHECK(mx.contains(std::max(x, y), 1e-15));
    CHECK(cv.contains(w * x + (1 - w) * y, 1e-15));
    // complement is an involution
    CHECK(cm.complement().lo == doctest::Approx(A.lo));
  }
}

TEST_CASE("wilson interval") {
  auto all = wilson_interval(100, 100, 0.99);
  CHECK(all.hi == 1.0);
  CHECK(all.lo > 0.9);
  CHECK(all.lo < 1.0);
  auto half = wilson_interval(5000, 10000, 0.99);
  CHECK(half.contains(0.5));
  CHECK(half.width() < 0.03);
  CHECK(wilson_interval(0, 0, 0.99).width() == 1.0);
  // Wider at higher confidence.
  CHECK(wilson_interval(30, 100, 0.999).width() > wilson_interval(30, 100, 0.9).width());
}
