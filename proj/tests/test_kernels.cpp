#include "doctest.h"

#include <cstring>
#include <vector>

#include "wsn/kernels.hpp"
#include "wsn/rng.hpp"

using namespace wsn;

namespace {

std::vector<double> draws(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar range_mask uses an inclusive boundary") {
  const std::vector<double> xs{0.0, 3.0, 3.0, 10.0};
  const std::vector<double> ys{0.0, 4.0, 4.000001, 0.0};
  std::vector<std::uint8_t> out(xs.size());
  kernels::scalar::range_mask(0.0, 0.0, xs, ys, 25.0, out);
  CHECK(out == std::vector<std::uint8_t>{1, 1, 0, 0});
}

TEST_CASE("scalar ema_blend matches the closed form") {
  const std::vector<double> xi{0.5, 0.5, 0.8}, xk{1.0, 1.0, 0.0}, alpha{0.0, 0.5, 0.5};
  std::vector<double> out(3);
  kernels::scalar::ema_blend(xi, xk, alpha, out);
  CHECK(out[0] == 0.5);
  CHECK(out[1] == 0.75);
  CHECK(out[2] == 0.4);
}

TEST_CASE("dispatch can be forced and reset") {
  kernels::force(kernels::Backend::Scalar);
  CHECK(kernels::active() == kernels::Backend::Scalar);
  kernels::reset();
  if (kernels::available(kernels::Backend::Avx2)) {
    CHECK(kernels::active() == kernels::Backend::Avx2);
  } else {
    CHECK_THROWS(kernels::force(kernels::Backend::Avx2));
  }
}

#if defined(WSN_HAVE_AVX2)
TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
  if (!kernels::available(kernels::Backend::Avx2)) return;
  Rng rng(42);
  // Lengths straddle the vector width so the scalar tail is exercised.
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 63u, 64u, 1001u}) {
    CAPTURE(n);
    const auto xs = draws(rng, n, 0, 1500), ys = draws(rng, n, 0, 300);
    std::vector<std::uint8_t> a(n), b(n);
    for (double r : {0.0, 1.0, 150.0, 250.0, 2000.0}) {
      kernels::scalar::range_mask(700, 150, xs, ys, r * r, a);
      kernels::avx2::range_mask(700, 150, xs, ys, r * r, b);
      CHECK(a == b);
    }
    const auto xi = draws(rng, n, 0, 1), xk = draws(rng, n, 0, 1), al = draws(rng, n, 0, 1);
    std::vector<double> s(n), v(n);
    kernels::scalar::ema_blend(xi, xk, al, s);
    kernels::avx2::ema_blend(xi, xk, al, v);
    CHECK(same_bits(s, v));
  }
}

TEST_CASE("avx2 range_mask agrees on points exactly at the boundary") {
  if (!kernels::available(kernels::Backend::Avx2)) return;
  std::vector<double> xs, ys;
  for (int i = 0; i < 37; ++i) {
    xs.push_back(3.0 * (i % 5));
    ys.push_back(4.0 * (i % 3));
  }
  std::vector<std::uint8_t> a(xs.size()), b(xs.size());
  kernels::scalar::range_mask(0, 0, xs, ys, 25.0, a);
  kernels::avx2::range_mask(0, 0, xs, ys, 25.0, b);
  CHECK(a == b);
}
#endif
