#pragma once
// Dense vector kernels used by the coordinate-descent inner loop and by
// column standardization. Each instruction set provides the same table;
// the active table is picked once at startup from CPU features.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace pendag::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);
  // x[i] = (x[i] - shift) * scale
  void (*shift_scale)(double* x, double shift, double scale, std::size_t n);
};

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void shift_scale(double* x, double shift, double scale, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void shift_scale(double* x, double shift, double scale, std::size_t n);
}  // namespace avx2

namespace neon {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
double sum(const double* x, std::size_t n);
void shift_scale(double* x, double shift, double scale, std::size_t n);
}  // namespace neon

// Instruction sets that were compiled in AND are supported by this CPU.
std::vector<Isa> available_isas();

// Throws std::invalid_argument if `isa` is not in available_isas().
const KernelTable& table_for(Isa isa);

// Best available table. PENDAG_ISA=scalar|avx2|neon in the environment
// forces a specific table (falls back to scalar if unsupported).
const KernelTable& active();

// Span conveniences over the active table.
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

}  // namespace pendag::kernels
