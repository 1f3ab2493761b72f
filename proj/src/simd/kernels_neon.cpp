// AArch64 variant. Two doubles per vector; same operation order as the
// scalar kernel.

#include <arm_neon.h>

#include <cassert>

#include "affdrive/simd/kernels.hpp"

namespace affdrive::simd {

SegmentHit nearest_segment_neon(const SegmentView& segs, double px, double py) {
  const std::size_t n = segs.size();
  assert(n > 0);
  if (n < 2) return nearest_segment_scalar(segs, px, py);

  const float64x2_t vpx = vdupq_n_f64(px);
  const float64x2_t vpy = vdupq_n_f64(py);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t two = vdupq_n_f64(2.0);

  float64x2_t best_d2 = vdupq_n_f64(__builtin_inf());
  float64x2_t best_t = zero;
  float64x2_t best_idx = zero;
  const double idx0[2] = {0.0, 1.0};
  float64x2_t idx = vld1q_f64(idx0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t ax = vld1q_f64(segs.ax.data() + i);
    const float64x2_t ay = vld1q_f64(segs.ay.data() + i);
    const float64x2_t dx = vld1q_f64(segs.dx.data() + i);
    const float64x2_t dy = vld1q_f64(segs.dy.data() + i);
    const float64x2_t l2 = vld1q_f64(segs.len2.data() + i);

    const float64x2_t wx = vsubq_f64(vpx, ax);
    const float64x2_t wy = vsubq_f64(vpy, ay);
    float64x2_t t = vdivq_f64(vaddq_f64(vmulq_f64(wx, dx), vmulq_f64(wy, dy)), l2);
    t = vbslq_f64(vcltq_f64(t, one), t, one);
    t = vbslq_f64(vcgtq_f64(t, zero), t, zero);
    const float64x2_t qx = vaddq_f64(ax, vmulq_f64(t, dx));
    const float64x2_t qy = vaddq_f64(ay, vmulq_f64(t, dy));
    const float64x2_t rx = vsubq_f64(vpx, qx);
    const float64x2_t ry = vsubq_f64(vpy, qy);
    const float64x2_t d2 = vaddq_f64(vmulq_f64(rx, rx), vmulq_f64(ry, ry));

    const uint64x2_t better = vcltq_f64(d2, best_d2);
    best_d2 = vbslq_f64(better, d2, best_d2);
    best_t = vbslq_f64(better, t, best_t);
    best_idx = vbslq_f64(better, idx, best_idx);
    idx = vaddq_f64(idx, two);
  }

  double lane_d2[2], lane_t[2], lane_idx[2];
  vst1q_f64(lane_d2, best_d2);
  vst1q_f64(lane_t, best_t);
  vst1q_f64(lane_idx, best_idx);

  SegmentHit best{static_cast<std::size_t>(lane_idx[0]), lane_t[0], lane_d2[0]};
  const auto k = static_cast<std::size_t>(lane_idx[1]);
  if (lane_d2[1] < best.dist2 || (lane_d2[1] == best.dist2 && k < best.index)) {
    best = {k, lane_t[1], lane_d2[1]};
  }

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

double sum_squares_neon(std::span<const double> values) {
  // Two vector accumulators reproduce the scalar kernel's four lanes.
  const std::size_t n = values.size();
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t a = vld1q_f64(values.data() + i);
    const float64x2_t b = vld1q_f64(values.data() + i + 2);
    acc01 = vaddq_f64(acc01, vmulq_f64(a, a));
    acc23 = vaddq_f64(acc23, vmulq_f64(b, b));
  }
  double total = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
                 (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
  for (; i < n; ++i) total = total + values[i] * values[i];
  return total;
}

}  // namespace affdrive::simd
