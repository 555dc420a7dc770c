#include "wsn/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace wsn::kernels {

namespace scalar {

void range_mask(double x0, double y0, std::span<const double> xs, std::span<const double> ys,
                double range_sq, std::span<std::uint8_t> out) {
  const std::size_t n = xs.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = xs[j] - x0;
    const double dy = ys[j] - y0;
    const double dx2 = dx * dx;
    const double dy2 = dy * dy;
    out[j] = (dx2 + dy2 <= range_sq) ? 1 : 0;
  }
}

void ema_blend(std::span<const double> xi, std::span<const double> xk,
               std::span<const double> alpha, std::span<double> out) {
  const std::size_t n = xi.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double keep = (1.0 - alpha[j]) * xi[j];
    const double take = alpha[j] * xk[j];
    out[j] = keep + take;
  }
}

}  // namespace scalar

namespace {

bool cpu_has_avx2() {
#if defined(WSN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect() { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

std::string_view name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool available(Backend b) { return b == Backend::Scalar || cpu_has_avx2(); }

Backend active() { return current().load(std::memory_order_relaxed); }

void force(Backend b) {
  if (!available(b)) throw std::runtime_error("kernel backend unavailable: " + std::string(name(b)));
  current().store(b, std::memory_order_relaxed);
}

void reset() { current().store(detect(), std::memory_order_relaxed); }

void range_mask(double x0, double y0, std::span<const double> xs, std::span<const double> ys,
                double range_sq, std::span<std::uint8_t> out) {
#if defined(WSN_HAVE_AVX2)
  if (active() == Backend::Avx2) return avx2::range_mask(x0, y0, xs, ys, range_sq, out);
#endif
  scalar::range_mask(x0, y0, xs, ys, range_sq, out);
}

void ema_blend(std::span<const double> xi, std::span<const double> xk,
               std::span<const double> alpha, std::span<double> out) {
#if defined(WSN_HAVE_AVX2)
  if (active() == Backend::Avx2) return avx2::ema_blend(xi, xk, alpha, out);
#endif
  scalar::ema_blend(xi, xk, alpha, out);
}

}  // namespace wsn::kernels
