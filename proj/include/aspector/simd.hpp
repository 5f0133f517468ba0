#pragma once

// Dense vector kernels used by the similarity and topic-model code paths.
// Scalar reference implementations are always available; AVX2 (x86-64) and
// NEON (aarch64) variants are selected at runtime and equivalence-tested
// against the scalar versions.

#include <cstddef>
#include <span>

namespace aspector::simd {

enum class Isa { scalar, avx2, neon };

// ISA picked at startup for the current CPU.
Isa active_isa();
const char* isa_name(Isa isa);

// Test hook: pin the dispatch to a specific ISA. Returns the previous one.
// Forcing an ISA the CPU does not support falls back to scalar.
Isa force_isa(Isa isa);

// Scalar reference kernels.
double dot_scalar(std::span<const double> a, std::span<const double> b);
double sum_scalar(std::span<const double> a);
void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y);
void scale_scalar(std::span<double> x, double alpha);

#if defined(ASPECTOR_HAVE_AVX2)
double dot_avx2(std::span<const double> a, std::span<const double> b);
double sum_avx2(std::span<const double> a);
void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y);
void scale_avx2(std::span<double> x, double alpha);
#endif

#if defined(ASPECTOR_HAVE_NEON)
double dot_neon(std::span<const double> a, std::span<const double> b);
double sum_neon(std::span<const double> a);
void axpy_neon(double alpha, std::span<const double> x, std::span<double> y);
void scale_neon(std::span<double> x, double alpha);
#endif

// Runtime-dispatched entry points. a and b must have equal length for dot.
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double alpha);

double norm(std::span<const double> a);

// Cosine of the angle between a and b; 0 when either vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace aspector::simd
