#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops of the toolkit. Every kernel has a scalar
// reference implementation and, where the target supports it, a SIMD variant
// (AVX2+FMA on x86-64, NEON on AArch64) selected once at runtime.
//
// Contract between variants:
//   * axpy and adam_update are elementwise and must be bit-identical to the
//     scalar reference (the SIMD code uses unfused multiply-add and IEEE
//     sqrt/div, the scalar translation units are built with -ffp-contract=off).
//   * dot and squared_distance are reductions; SIMD variants may reassociate
//     the sum and are held to a tight tolerance by the equivalence tests.
//
// The environment variable RELNET_KERNELS=scalar|avx2|neon forces a backend;
// an unsupported choice falls back to scalar.

namespace relnet::kernels {

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
const char* backend_name(Backend b);

// Forces a backend (used by the equivalence tests). Returns false and leaves
// the dispatch untouched when the requested backend is unavailable.
bool force_backend(Backend b);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i (a[i] - b[i])^2
double squared_distance(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

// One Adam update over a parameter block. bc1 = 1 - beta1^t and
// bc2 = 1 - beta2^t are the bias corrections for the current step t.
void adam_update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void adam_update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define RELNET_HAVE_AVX2_KERNELS 1
namespace avx2 {
bool supported();
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void adam_update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2);
}  // namespace avx2
#endif

#if defined(__aarch64__)
#define RELNET_HAVE_NEON_KERNELS 1
namespace neon {
bool supported();
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void adam_update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2);
}  // namespace neon
#endif

}  // namespace relnet::kernels
