#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace cg::kernels {

enum class Isa { Scalar, Avx2, Neon };

// Best instruction set supported by this CPU, unless CG_SIMD=scalar is set.
Isa active_isa();
std::string isa_name(Isa isa);
// Forces the dispatch target (tests use it to run both paths).
void force_isa(Isa isa);
bool isa_available(Isa isa);

// sum_k p[k] * v[idx[k]]
double dot_gather(const double* p, const int32_t* idx, const double* v, size_t n);
double sum(const double* a, size_t n);
// prod_k (1 - a[k])
double prod_one_minus(const double* a, size_t n);
double max_abs_diff(const double* a, const double* b, size_t n);

namespace scalar {
double dot_gather(const double* p, const int32_t* idx, const double* v, size_t n);
double sum(const double* a, size_t n);
double prod_one_minus(const double* a, size_t n);
double max_abs_diff(const double* a, const double* b, size_t n);
}  // namespace scalar

}  // namespace cg::kernels
