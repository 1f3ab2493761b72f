#include <algorithm>
#include <cassert>

#include "affdrive/simd/kernels.hpp"

namespace affdrive::simd {

void SegmentArrays::push_back(double x0, double y0, double x1, double y1) {
  const double ex = x1 - x0;
  const double ey = y1 - y0;
  ax.push_back(x0);
  ay.push_back(y0);
  dx.push_back(ex);
  dy.push_back(ey);
  len2.push_back(ex * ex + ey * ey);
}

SegmentHit nearest_segment_scalar(const SegmentView& segs, double px, double py) {
  assert(segs.size() > 0);
  SegmentHit best{0, 0.0, 0.0};
  bool have = false;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double wx = px - segs.ax[i];
    const double wy = py - segs.ay[i];
    double t = (wx * segs.dx[i] + wy * segs.dy[i]) / segs.len2[i];
    t = std::max(0.0, std::min(1.0, t));
    const double qx = segs.ax[i] + t * segs.dx[i];
    const double qy = segs.ay[i] + t * segs.dy[i];
    const double rx = px - qx;
    const double ry = py - qy;
    const double d2 = rx * rx + ry * ry;
    if (!have || d2 < best.dist2) {
      best = {i, t, d2};
      have = true;
    }
  }
  return best;
}

double sum_squares_scalar(std::span<const double> values) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = values.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) acc[j] = acc[j] + values[i + j] * values[i + j];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) total = total + values[i] * values[i];
  return total;
}

}  // namespace affdrive::simd
