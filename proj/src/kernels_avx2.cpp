// Compiled with -mavx2 only; reached through runtime dispatch in kernels.cpp.

#include <immintrin.h>

#include "wsn/kernels.hpp"

namespace wsn::kernels::avx2 {

void range_mask(double x0, double y0, std::span<const double> xs, std::span<const double> ys,
                double range_sq, std::span<std::uint8_t> out) {
  constexpr std::size_t kLanes = 4;
  const std::size_t n = xs.size();
  const __m256d vx0 = _mm256_set1_pd(x0);
  const __m256d vy0 = _mm256_set1_pd(y0);
  const __m256d vr2 = _mm256_set1_pd(range_sq);

  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + j), vx0);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + j), vy0);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
    out[j + 0] = static_cast<std::uint8_t>(bits & 1);
    out[j + 1] = static_cast<std::uint8_t>((bits >> 1) & 1);
    out[j + 2] = static_cast<std::uint8_t>((bits >> 2) & 1);
    out[j + 3] = static_cast<std::uint8_t>((bits >> 3) & 1);
  }
  // tail
  if (j < n) {
    scalar::range_mask(x0, y0, xs.subspan(j), ys.subspan(j), range_sq, out.subspan(j));
  }
}

void ema_blend(std::span<const double> xi, std::span<const double> xk,
               std::span<const double> alpha, std::span<double> out) {
  constexpr std::size_t kLanes = 4;
  const std::size_t n = xi.size();
  const __m256d one = _mm256_set1_pd(1.0);

  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d a = _mm256_loadu_pd(alpha.data() + j);
    const __m256d keep = _mm256_mul_pd(_mm256_sub_pd(one, a), _mm256_loadu_pd(xi.data() + j));
    const __m256d take = _mm256_mul_pd(a, _mm256_loadu_pd(xk.data() + j));
    _mm256_storeu_pd(out.data() + j, _mm256_add_pd(keep, take));
  }
  if (j < n) {
    scalar::ema_blend(xi.subspan(j), xk.subspan(j), alpha.subspan(j), out.subspan(j));
  }
}

}  // namespace wsn::kernels::avx2
