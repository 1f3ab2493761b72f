// Compiled with -mavx2 (and deliberately without -mfma). Only reached through
// the dispatcher after a CPU feature check.

#include <immintrin.h>

#include <cassert>

#include "affdrive/simd/kernels.hpp"

namespace affdrive::simd {

SegmentHit nearest_segment_avx2(const SegmentView& segs, double px, double py) {
  const std::size_t n = segs.size();
  assert(n > 0);
  if (n < 4) return nearest_segment_scalar(segs, px, py);

  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d four = _mm256_set1_pd(4.0);

  __m256d best_d2 = _mm256_set1_pd(__builtin_inf());
  __m256d best_t = zero;
  __m256d best_idx = zero;
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_loadu_pd(segs.ax.data() + i);
    const __m256d ay = _mm256_loadu_pd(segs.ay.data() + i);
    const __m256d dx = _mm256_loadu_pd(segs.dx.data() + i);
    const __m256d dy = _mm256_loadu_pd(segs.dy.data() + i);
    const __m256d l2 = _mm256_loadu_pd(segs.len2.data() + i);

    const __m256d wx = _mm256_sub_pd(vpx, ax);
    const __m256d wy = _mm256_sub_pd(vpy, ay);
    __m256d t = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(wx, dx), _mm256_mul_pd(wy, dy)), l2);
    t = _mm256_max_pd(_mm256_min_pd(t, one), zero);
    const __m256d qx = _mm256_add_pd(ax, _mm256_mul_pd(t, dx));
    const __m256d qy = _mm256_add_pd(ay, _mm256_mul_pd(t, dy));
    const __m256d rx = _mm256_sub_pd(vpx, qx);
    const __m256d ry = _mm256_sub_pd(vpy, qy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(rx, rx), _mm256_mul_pd(ry, ry));

    const __m256d better = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
    best_d2 = _mm256_blendv_pd(best_d2, d2, better);
    best_t = _mm256_blendv_pd(best_t, t, better);
    best_idx = _mm256_blendv_pd(best_idx, idx, better);
    idx = _mm256_add_pd(idx, four);
  }

  alignas(32) double lane_d2[4];
  alignas(32) double lane_t[4];
  alignas(32) double lane_idx[4];
  _mm256_store_pd(lane_d2, best_d2);
  _mm256_store_pd(lane_t, best_t);
  _mm256_store_pd(lane_idx, best_idx);

  SegmentHit best{static_cast<std::size_t>(lane_idx[0]), lane_t[0], lane_d2[0]};
  for (int j = 1; j < 4; ++j) {
    const auto k = static_cast<std::size_t>(lane_idx[j]);
    if (lane_d2[j] < best.dist2 || (lane_d2[j] == best.dist2 && k < best.index)) {
      best = {k, lane_t[j], lane_d2[j]};
    }
  }

  // Tail indices are larger than anything above, so strict < keeps ties low.
  for (; i < n; ++i) {
    const double wx = px - segs.ax[i];
    const double wy = py - segs.ay[i];
    double t = (wx * segs.dx[i] + wy * segs.dy[i]) / segs.len2[i];
    t = t < 1.0 ? t : 1.0;
    t = t > 0.0 ? t : 0.0;
    const double qx = segs.ax[i] + t * segs.dx[i];
    const double qy = segs.ay[i] + t * segs.dy[i];
    const double rx = px - qx;
    const double ry = py - qy;
    const double d2 = rx * rx + ry * ry;
    if (d2 < best.dist2) best = {i, t, d2};
  }
  return best;
}

double sum_squares_avx2(std::span<const double> values) {
  const std::size_t n = values.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(values.data() + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total = total + values[i] * values[i];
  return total;
}

}  // namespace affdrive::simd
