#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and
// one vectorised version per ISA; the vectorised versions perform the same
// IEEE operations in the same order, so results are bit-identical and traces
// do not depend on which implementation the dispatcher picked.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace affdrive::simd {

/// Structure-of-arrays view over polyline segments a_i -> a_i + d_i.
struct SegmentView {
  std::span<const double> ax;
  std::span<const double> ay;
  std::span<const double> dx;
  std::span<const double> dy;
  std::span<const double> len2;  // dx^2 + dy^2, strictly positive

  std::size_t size() const { return ax.size(); }
};

struct SegmentArrays {
  std::vector<double> ax, ay, dx, dy, len2;

  void push_back(double x0, double y0, double x1, double y1);
  SegmentView view() const { return {ax, ay, dx, dy, len2}; }
};

struct SegmentHit {
  std::size_t index = 0;
  double t = 0.0;      // clamped projection parameter on the segment
  double dist2 = 0.0;  // squared distance from the query point
};

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

/// ISA used by the dispatching entry points. Chosen once from CPU features;
/// the AFFDRIVE_SIMD environment variable ("scalar", "avx2", "neon") can
/// force a lower level.
Isa active_isa();
bool isa_available(Isa isa);

// Closest segment to (px, py). Ties go to the lowest index. Requires a
// non-empty view.
SegmentHit nearest_segment(const SegmentView& segs, double px, double py);
SegmentHit nearest_segment_scalar(const SegmentView& segs, double px, double py);
SegmentHit nearest_segment_avx2(const SegmentView& segs, double px, double py);
SegmentHit nearest_segment_neon(const SegmentView& segs, double px, double py);

// Sum of squares with four interleaved accumulators, combined as
// (acc0 + acc1) + (acc2 + acc3), then the tail in order.
double sum_squares(std::span<const double> values);
double sum_squares_scalar(std::span<const double> values);
double sum_squares_avx2(std::span<const double> values);
double sum_squares_neon(std::span<const double> values);

}  // namespace affdrive::simd
