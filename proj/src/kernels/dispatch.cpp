#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pendag/kernels.hpp"

namespace pendag::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, scalar::dot, scalar::axpy, scalar::sum,
                              scalar::shift_scale};
#if defined(PENDAG_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, avx2::dot, avx2::axpy, avx2::sum, avx2::shift_scale};
#endif
#if defined(PENDAG_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, neon::dot, neon::axpy, neon::sum, neon::shift_scale};
#endif

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(PENDAG_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(PENDAG_HAVE_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* lookup(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
#if defined(PENDAG_HAVE_AVX2)
      return &kAvx2;
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(PENDAG_HAVE_NEON)
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& select() {
  const auto isas = available_isas();
  if (const char* forced = std::getenv("PENDAG_ISA")) {
    const std::string want(forced);
    for (Isa isa : isas)
      if (isa_name(isa) == want) return *lookup(isa);
    return kScalar;
  }
  return *lookup(isas.back());
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (lookup(isa) != nullptr && cpu_supports(isa)) out.push_back(isa);
  return out;
}

const KernelTable& table_for(Isa isa) {
  const auto isas = available_isas();
  if (std::find(isas.begin(), isas.end(), isa) == isas.end())
    throw std::invalid_argument("instruction set not available: " + std::string(isa_name(isa)));
  return *lookup(isa);
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace pendag::kernels
