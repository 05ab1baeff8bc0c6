#include <cstdlib>
#include <cstring>

#include "tomolab/errors.hpp"
#include "tomolab/kernels.hpp"

namespace tomolab::kernels {

#if defined(TOMOLAB_HAVE_AVX2)
const KernelTable* avx2_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(TOMOLAB_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* forced = std::getenv("TOMOLAB_SIMD");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

void dot_rows(std::span<const double> rows, std::size_t d, std::span<const double> v,
              std::span<double> out) {
  if (v.size() != d || rows.size() != out.size() * d) throw DimensionMismatch("dot_rows: shape mismatch");
  active().dot_rows(rows.data(), out.size(), d, v.data(), out.data());
}

double multiply_sum(std::span<double> w, std::span<const double> l) {
  if (w.size() != l.size()) throw DimensionMismatch("multiply_sum: length mismatch");
  return active().multiply_sum(w.data(), l.data(), w.size());
}

void scale(std::span<double> x, double s) { active().scale(x.data(), x.size(), s); }

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

void weighted_row_sum(std::span<const double> rows, std::size_t d, std::span<const double> w,
                      std::span<double> out) {
  if (out.size() != d || rows.size() != w.size() * d) {
    throw DimensionMismatch("weighted_row_sum: shape mismatch");
  }
  active().weighted_row_sum(rows.data(), w.size(), d, w.data(), out.data());
}

}  // namespace tomolab::kernels
