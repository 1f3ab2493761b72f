#include <cstdlib>
#include <string>

#include "affdrive/simd/kernels.hpp"

namespace affdrive::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(AFFDRIVE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(AFFDRIVE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() {
  Isa best = Isa::scalar;
  if (isa_available(Isa::avx2)) best = Isa::avx2;
  if (isa_available(Isa::neon)) best = Isa::neon;
  if (const char* forced = std::getenv("AFFDRIVE_SIMD")) {
    const std::string f = forced;
    if (f == "scalar") return Isa::scalar;
    if (f == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
    if (f == "neon" && isa_available(Isa::neon)) return Isa::neon;
  }
  return best;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

#if !defined(AFFDRIVE_HAVE_AVX2)
SegmentHit nearest_segment_avx2(const SegmentView& segs, double px, double py) {
  return nearest_segment_scalar(segs, px, py);
}
double sum_squares_avx2(std::span<const double> values) { return sum_squares_scalar(values); }
#endif

#if !defined(AFFDRIVE_HAVE_NEON)
SegmentHit nearest_segment_neon(const SegmentView& segs, double px, double py) {
  return nearest_segment_scalar(segs, px, py);
}
double sum_squares_neon(std::span<const double> values) { return sum_squares_scalar(values); }
#endif

SegmentHit nearest_segment(const SegmentView& segs, double px, double py) {
  switch (active_isa()) {
    case Isa::avx2: return nearest_segment_avx2(segs, px, py);
    case Isa::neon: return nearest_segment_neon(segs, px, py);
    case Isa::scalar: break;
  }
  return nearest_segment_scalar(segs, px, py);
}

double sum_squares(std::span<const double> values) {
  switch (active_isa()) {
    case Isa::avx2: return sum_squares_avx2(values);
    case Isa::neon: return sum_squares_neon(values);
    case Isa::scalar: break;
  }
  return sum_squares_scalar(values);
}

}  // namespace affdrive::simd
