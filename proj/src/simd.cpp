#include "aspector/simd.hpp"

#include <atomic>
#include <cassert>
#include <cmath>

namespace aspector::simd {

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(std::span<const double> a) {
  double acc = 0.0;
  for (double v : a) acc += v;
  return acc;
}

void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale_scalar(std::span<double> x, double alpha) {
  for (double& v : x) v *= alpha;
}

namespace {

Isa detect_isa() {
#if defined(ASPECTOR_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
#if defined(ASPECTOR_HAVE_NEON)
  return Isa::neon;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& isa_state() {
  static std::atomic<Isa> state{detect_isa()};
  return state;
}

Isa supported_or_scalar(Isa isa) {
  switch (isa) {
    case Isa::avx2:
#if defined(ASPECTOR_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2")) return Isa::avx2;
#endif
      return Isa::scalar;
    case Isa::neon:
#if defined(ASPECTOR_HAVE_NEON)
      return Isa::neon;
#else
      return Isa::scalar;
#endif
    case Isa::scalar:
      break;
  }
  return Isa::scalar;
}

}  // namespace

Isa active_isa() { return isa_state().load(std::memory_order_relaxed); }

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    case Isa::scalar: break;
  }
  return "scalar";
}

Isa force_isa(Isa isa) {
  return isa_state().exchange(supported_or_scalar(isa), std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  switch (active_isa()) {
#if defined(ASPECTOR_HAVE_AVX2)
    case Isa::avx2: return dot_avx2(a, b);
#endif
#if defined(ASPECTOR_HAVE_NEON)
    case Isa::neon: return dot_neon(a, b);
#endif
    default: return dot_scalar(a, b);
  }
}

double sum(std::span<const double> a) {
  switch (active_isa()) {
#if defined(ASPECTOR_HAVE_AVX2)
    case Isa::avx2: return sum_avx2(a);
#endif
#if defined(ASPECTOR_HAVE_NEON)
    case Isa::neon: return sum_neon(a);
#endif
    default: return sum_scalar(a);
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  switch (active_isa()) {
#if defined(ASPECTOR_HAVE_AVX2)
    case Isa::avx2: return axpy_avx2(alpha, x, y);
#endif
#if defined(ASPECTOR_HAVE_NEON)
    case Isa::neon: return axpy_neon(alpha, x, y);
#endif
    default: return axpy_scalar(alpha, x, y);
  }
}

void scale(std::span<double> x, double alpha) {
  switch (active_isa()) {
#if defined(ASPECTOR_HAVE_AVX2)
    case Isa::avx2: return scale_avx2(x, alpha);
#endif
#if defined(ASPECTOR_HAVE_NEON)
    case Isa::neon: return scale_neon(x, alpha);
#endif
    default: return scale_scalar(x, alpha);
  }
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const double> a, std::span<const double> b) {
  double na = norm(a);
  double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

}  // namespace aspector::simd
