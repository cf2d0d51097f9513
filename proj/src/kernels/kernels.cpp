#include "relnet/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace relnet::kernels {

namespace {

struct Vtable {
  Backend backend;
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*adam_update)(double*, const double*, double*, double*, std::size_t, double, double,
                      double, double, double, double);
};

constexpr Vtable kScalar = {Backend::Scalar, scalar::dot, scalar::squared_distance, scalar::axpy,
                            scalar::adam_update};

#if defined(RELNET_HAVE_AVX2_KERNELS)
constexpr Vtable kAvx2 = {Backend::Avx2, avx2::dot, avx2::squared_distance, avx2::axpy,
                          avx2::adam_update};
#endif
#if defined(RELNET_HAVE_NEON_KERNELS)
constexpr Vtable kNeon = {Backend::Neon, neon::dot, neon::squared_distance, neon::axpy,
                          neon::adam_update};
#endif

const Vtable* vtable_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &kScalar;
    case Backend::Avx2:
#if defined(RELNET_HAVE_AVX2_KERNELS)
      if (avx2::supported()) return &kAvx2;
#endif
      return nullptr;
    case Backend::Neon:
#if defined(RELNET_HAVE_NEON_KERNELS)
      if (neon::supported()) return &kNeon;
#endif
      return nullptr;
  }
  return nullptr;
}

const Vtable* detect() {
  if (const char* env = std::getenv("RELNET_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return &kScalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (const Vtable* vt = vtable_for(Backend::Avx2)) return vt;
    }
    if (std::strcmp(env, "neon") == 0) {
      if (const Vtable* vt = vtable_for(Backend::Neon)) return vt;
    }
    return &kScalar;  // unknown or unsupported request
  }
#if defined(RELNET_HAVE_AVX2_KERNELS)
  if (avx2::supported()) return &kAvx2;
#endif
#if defined(RELNET_HAVE_NEON_KERNELS)
  if (neon::supported()) return &kNeon;
#endif
  return &kScalar;
}

const Vtable*& active() {
  static const Vtable* vt = detect();
  return vt;
}

}  // namespace

Backend active_backend() { return active()->backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "?";
}

bool force_backend(Backend b) {
  const Vtable* vt = vtable_for(b);
  if (!vt) return false;
  active() = vt;
  return true;
}

double dot(const double* a, const double* b, std::size_t n) { return active()->dot(a, b, n); }

double squared_distance(const double* a, const double* b, std::size_t n) {
  return active()->squared_distance(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active()->axpy(alpha, x, y, n);
}

void adam_update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
                 double beta1, double beta2, double eps, double bc1, double bc2) {
  active()->adam_update(p, g, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
}

}  // namespace relnet::kernels
