#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "relnet/common.hpp"
#include "relnet/kernels.hpp"

using namespace relnet;

namespace {

// lengths straddling every SIMD block boundary
const std::size_t kLengths[] = {0,  1,  2,  3,  4,  5,  7,   8,   9,   15,  16, 17,
                                31, 32, 33, 63, 64, 65, 100, 255, 256, 257, 1000};

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

#if defined(RELNET_HAVE_AVX2_KERNELS)

TEST_CASE("avx2 reductions match scalar within accumulated rounding") {
  if (!kernels::avx2::supported()) return;
  Rng rng(2024);
  for (std::size_t n : kLengths) {
    for (int trial = 0; trial < 8; ++trial) {
      std::vector<double> a = random_vec(n, rng);
      std::vector<double> b = random_vec(n, rng);
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) mass += std::abs(a[i] * b[i]);

      const double d_scalar = kernels::scalar::dot(a.data(), b.data(), n);
      const double d_avx2 = kernels::avx2::dot(a.data(), b.data(), n);
      CHECK(std::abs(d_scalar - d_avx2) <= 1e-12 * (1.0 + mass));

      const double s_scalar = kernels::scalar::squared_distance(a.data(), b.data(), n);
      const double s_avx2 = kernels::avx2::squared_distance(a.data(), b.data(), n);
      CHECK(std::abs(s_scalar - s_avx2) <= 1e-12 * (1.0 + s_scalar));
    }
  }
}

TEST_CASE("avx2 elementwise kernels are bit-identical to scalar") {
  if (!kernels::avx2::supported()) return;
  Rng rng(77);
  for (std::size_t n : kLengths) {
    std::vector<double> x = random_vec(n, rng, -3.0, 3.0);
    std::vector<double> y1 = random_vec(n, rng, -3.0, 3.0);
    std::vector<double> y2 = y1;
    kernels::scalar::axpy(0.37, x.data(), y1.data(), n);
    kernels::avx2::axpy(0.37, x.data(), y2.data(), n);
    CHECK(y1 == y2);

    std::vector<double> p1 = random_vec(n, rng), p2 = p1;
    std::vector<double> g = random_vec(n, rng, -2.0, 2.0);
    std::vector<double> m1 = random_vec(n, rng, -0.5, 0.5), m2 = m1;
    std::vector<double> v1 = random_vec(n, rng, 0.0, 0.5), v2 = v1;
    const double bc1 = 1.0 - std::pow(0.9, 3), bc2 = 1.0 - std::pow(0.999, 3);
    kernels::scalar::adam_update(p1.data(), g.data(), m1.data(), v1.data(), n, 1e-3, 0.9, 0.999,
                                 1e-8, bc1, bc2);
    kernels::avx2::adam_update(p2.data(), g.data(), m2.data(), v2.data(), n, 1e-3, 0.9, 0.999,
                               1e-8, bc1, bc2);
    CHECK(p1 == p2);
    CHECK(m1 == m2);
    CHECK(v1 == v2);
  }
}

#endif  // RELNET_HAVE_AVX2_KERNELS

TEST_CASE("dispatched kernels honor force_backend") {
  std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> b = {0.5, -1.0, 2.0, 0.25, -0.125};
  const kernels::Backend original = kernels::active_backend();

  REQUIRE(kernels::force_backend(kernels::Backend::Scalar));
  const double expected = kernels::scalar::dot(a.data(), b.data(), a.size());
  CHECK(kernels::dot(a.data(), b.data(), a.size()) == expected);
  CHECK(kernels::active_backend() == kernels::Backend::Scalar);

  kernels::force_backend(original);
  CHECK(kernels::active_backend() == original);
}

TEST_CASE("scalar kernel reference values") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  const std::vector<double> b = {4.0, 5.0, 6.0};
  CHECK(kernels::scalar::dot(a.data(), b.data(), 3) == doctest::Approx(32.0));
  CHECK(kernels::scalar::squared_distance(a.data(), b.data(), 3) == doctest::Approx(27.0));

  std::vector<double> y = {1.0, 1.0, 1.0};
  kernels::scalar::axpy(2.0, a.data(), y.data(), 3);
  CHECK(y == std::vector<double>{3.0, 5.0, 7.0});
}

TEST_CASE("adam kernel first step is a signed unit step scaled by lr") {
  double p = 1.0, g = 2.0, m = 0.0, v = 0.0;
  const double bc1 = 1.0 - 0.9, bc2 = 1.0 - 0.999;
  kernels::scalar::adam_update(&p, &g, &m, &v, 1, 0.001, 0.9, 0.999, 1e-8, bc1, bc2);
  CHECK(p == doctest::Approx(0.999).epsilon(1e-9));
}
