#pragma once

// Data-parallel inner loops of the particle filter.
//
// Each kernel has a scalar reference implementation and, on x86-64 builds, an
// AVX2/FMA variant. The variant is picked once at runtime from CPUID; setting
// TOMOLAB_SIMD=scalar in the environment forces the reference path. The two
// paths agree to rounding (FMA contraction and summation order differ), which
// tests/test_kernels.cpp pins down.

#include <cstddef>
#include <span>

namespace tomolab::kernels {

struct KernelTable {
  const char* name;
  /// out[i] = <rows[i, :], v> for an n x d row-major block.
  void (*dot_rows)(const double* rows, std::size_t n, std::size_t d, const double* v, double* out);
  /// w[i] *= l[i]; returns sum_i w[i] after the update.
  double (*multiply_sum)(double* w, const double* l, std::size_t n);
  /// x[i] *= s
  void (*scale)(double* x, std::size_t n, double s);
  /// sum_i x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  /// out[j] = sum_i w[i] rows[i, j]
  void (*weighted_row_sum)(const double* rows, std::size_t n, std::size_t d, const double* w,
                           double* out);
};

const KernelTable& scalar_table();

/// AVX2 table, or nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2_table();

/// The table used by the library (chosen on first call).
const KernelTable& active();

void dot_rows(std::span<const double> rows, std::size_t d, std::span<const double> v,
              std::span<double> out);
double multiply_sum(std::span<double> w, std::span<const double> l);
void scale(std::span<double> x, double s);
double sum_squares(std::span<const double> x);
void weighted_row_sum(std::span<const double> rows, std::size_t d, std::span<const double> w,
                      std::span<double> out);

}  // namespace tomolab::kernels
