#include "pendag/kernels.hpp"

namespace pendag::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void shift_scale(double* x, double shift, double scale, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = (x[i] - shift) * scale;
}

}  // namespace pendag::kernels::scalar
