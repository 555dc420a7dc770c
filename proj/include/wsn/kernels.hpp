#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, where
// the target supports it, an AVX2 variant selected once at runtime. Variants
// must be bit-identical to the reference: no FMA contraction, same operation
// order, so simulation traces do not depend on the host CPU.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace wsn::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view name(Backend b);

/// True when the running CPU and this build both support `b`.
bool available(Backend b);

/// Backend currently used by the dispatching entry points.
Backend active();

/// Override dispatch (tests and benchmarks). Throws if unavailable.
void force(Backend b);

/// Restore automatic selection.
void reset();

/// out[j] = 1 iff (xs[j]-x0)^2 + (ys[j]-y0)^2 <= range_sq, else 0.
void range_mask(double x0, double y0, std::span<const double> xs, std::span<const double> ys,
                double range_sq, std::span<std::uint8_t> out);

/// out[j] = (1 - alpha[j]) * xi[j] + alpha[j] * xk[j]
void ema_blend(std::span<const double> xi, std::span<const double> xk,
               std::span<const double> alpha, std::span<double> out);

namespace scalar {
void range_mask(double x0, double y0, std::span<const double> xs, std::span<const double> ys,
                double range_sq, std::span<std::uint8_t> out);
void ema_blend(std::span<const double> xi, std::span<const double> xk,
               std::span<const double> alpha, std::span<double> out);
}  // namespace scalar

#if defined(WSN_HAVE_AVX2)
namespace avx2 {
void range_mask(double x0, double y0, std::span<const double> xs, std::span<const double> ys,
                double range_sq, std::span<std::uint8_t> out);
void ema_blend(std::span<const double> xi, std::span<const double> xk,
               std::span<const double> alpha, std::span<double> out);
}  // namespace avx2
#endif

}  // namespace wsn::kernels
