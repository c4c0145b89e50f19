#include "cg/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__)
#include <immintrin.h>
#elif defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace cg::kernels {

namespace scalar {

double dot_gather(const double* p, const int32_t* idx, const double* v, size_t n) {
  double s = 0.0;
  for (size_t k = 0; k < n; ++k) s += p[k] * v[idx[k]];
  return s;
}

double sum(const double* a, size_t n) {
  double s = 0.0;
  for (size_t k = 0; k < n; ++k) s += a[k];
  return s;
}

double prod_one_minus(const double* a, size_t n) {
  double s = 1.0;
  for (size_t k = 0; k < n; ++k) s *= 1.0 - a[k];
  return s;
}

double max_abs_diff(const double* a, const double* b, size_t n) {
  double m = 0.0;
  for (size_t k = 0; k < n; ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {

__attribute__((target("avx2"))) double hsum(__m256d x) {
  __m128d lo = _mm256_castpd256_pd128(x);
  __m128d hi = _mm256_extractf128_pd(x, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

__attribute__((target("avx2"))) double dot_gather(const double* p, const int32_t* idx, const double* v, size_t n) {
  if (n < 8) return scalar::dot_gather(p, idx, v, n);
  __m256d acc = _mm256_setzero_pd();
  size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m128i ix = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    __m256d g = _mm256_i32gather_pd(v, ix, 8);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(p + k), g));
  }
  double s = hsum(acc);
  for (; k < n; ++k) s += p[k] * v[idx[k]];
  return s;
}

__attribute__((target("avx2"))) double sum(const double* a, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t k = 0;
  for (; k + 4 <= n; k += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + k));
  double s = hsum(acc);
  for (; k < n; ++k) s += a[k];
  return s;
}

__attribute__((target("avx2"))) double prod_one_minus(const double* a, size_t n) {
  __m256d acc = _mm256_set1_pd(1.0);
  const __m256d one = _mm256_set1_pd(1.0);
  size_t k = 0;
  for (; k + 4 <= n; k += 4) acc = _mm256_mul_pd(acc, _mm256_sub_pd(one, _mm256_loadu_pd(a + k)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = lanes[0] * lanes[1] * lanes[2] * lanes[3];
  for (; k < n; ++k) s *= 1.0 - a[k];
  return s;
}

__attribute__((target("avx2"))) double max_abs_diff(const double* a, const double* b, size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; k < n; ++k) r = std::max(r, std::abs(a[k] - b[k]));
  return r;
}

}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {

double sum(const double* a, size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t k = 0;
  for (; k + 2 <= n; k += 2) acc = vaddq_f64(acc, vld1q_f64(a + k));
  double s = vaddvq_f64(acc);
  for (; k < n; ++k) s += a[k];
  return s;
}

double prod_one_minus(const double* a, size_t n) {
  float64x2_t acc = vdupq_n_f64(1.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  size_t k = 0;
  for (; k + 2 <= n; k += 2) acc = vmulq_f64(acc, vsubq_f64(one, vld1q_f64(a + k)));
  double s = vgetq_lane_f64(acc, 0) * vgetq_lane_f64(acc, 1);
  for (; k < n; ++k) s *= 1.0 - a[k];
  return s;
}

double max_abs_diff(const double* a, const double* b, size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  size_t k = 0;
  for (; k + 2 <= n; k += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
  double r = vmaxvq_f64(m);
  for (; k < n; ++k) r = std::max(r, std::abs(a[k] - b[k]));
  return r;
}

}  // namespace neon
#endif

namespace {

Isa detect() {
  const char* env = std::getenv("CG_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
#if defined(__x86_64__)
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#elif defined(__aarch64__)
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

std::atomic<int> g_isa{-1};

Isa current() {
  int v = g_isa.load(std::memory_order_relaxed);
  if (v < 0) {
    v = int(detect());
    g_isa.store(v, std::memory_order_relaxed);
  }
  return Isa(v);
}

}  // namespace

Isa active_isa() { return current(); }

std::string isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

void force_isa(Isa isa) { g_isa.store(int(isa_available(isa) ? isa : Isa::Scalar), std::memory_order_relaxed); }

double dot_gather(const double* p, const int32_t* idx, const double* v, size_t n) {
#if defined(__x86_64__)
  if (current() == Isa::Avx2) return avx2::dot_gather(p, idx, v, n);
#endif
  // NEON has no gather; the scalar loop is what the compiler would emit anyway.
  return scalar::dot_gather(p, idx, v, n);
}

double sum(const double* a, size_t n) {
#if defined(__x86_64__)
  if (current() == Isa::Avx2) return avx2::sum(a, n);
#elif defined(__aarch64__)
  if (current() == Isa::Neon) return neon::sum(a, n);
#endif
  return scalar::sum(a, n);
}

double prod_one_minus(const double* a, size_t n) {
#if defined(__x86_64__)
  if (current() == Isa::Avx2) return avx2::prod_one_minus(a, n);
#elif defined(__aarch64__)
  if (current() == Isa::Neon) return neon::prod_one_minus(a, n);
#endif
  return scalar::prod_one_minus(a, n);
}

double max_abs_diff(const double* a, const double* b, size_t n) {
#if defined(__x86_64__)
  if (current() == Isa::Avx2) return avx2::max_abs_diff(a, b, n);
#elif defined(__aarch64__)
  if (current() == Isa::Neon) return neon::max_abs_diff(a, b, n);
#endif
  return scalar::max_abs_diff(a, b, n);
}

}  // namespace cg::kernels
