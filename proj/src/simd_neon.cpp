// NEON kernel variants (aarch64 baseline).

#include "aspector/simd.hpp"

#if defined(ASPECTOR_HAVE_NEON)

#include <arm_neon.h>

#include <cassert>

namespace aspector::simd {

double dot_neon(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a.data() + i + 2), vld1q_f64(b.data() + i + 2));
  }
  double total = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum_neon(std::span<const double> a) {
  const std::size_t n = a.size();
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a.data() + i));
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += a[i];
  return total;
}

void axpy_neon(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y.data() + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x.data() + i));
    vst1q_f64(y.data() + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(std::span<double> x, double alpha) {
  const std::size_t n = x.size();
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x.data() + i, vmulq_f64(va, vld1q_f64(x.data() + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

}  // namespace aspector::simd

#endif  // ASPECTOR_HAVE_NEON
