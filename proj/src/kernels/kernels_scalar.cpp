#include "tomolab/kernels.hpp"

namespace tomolab::kernels {

namespace {

void dot_rows_scalar(const double* rows, std::size_t n, std::size_t d, const double* v, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows + i * d;
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) acc += r[j] * v[j];
    out[i] = acc;
  }
}

double multiply_sum_scalar(double* w, const double* l, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] *= l[i];
    total += w[i];
  }
  return total;
}

void scale_scalar(double* x, std::size_t n, double s) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += x[i] * x[i];
  return total;
}

void weighted_row_sum_scalar(const double* rows, std::size_t n, std::size_t d, const double* w,
                             double* out) {
  for (std::size_t j = 0; j < d; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* r = rows + i * d;
    for (std::size_t j = 0; j < d; ++j) out[j] += w[i] * r[j];
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",          dot_rows_scalar,    multiply_sum_scalar,
                                 scale_scalar,      sum_squares_scalar, weighted_row_sum_scalar};
  return table;
}

}  // namespace tomolab::kernels
