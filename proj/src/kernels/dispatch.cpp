#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "tsgaudit/kernels.hpp"

namespace tsgaudit::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(TSGAUDIT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("TSGAUDIT_KERNEL"); env != nullptr && *env != '\0') {
    const Isa wanted = parse_isa(env);
    if (wanted == Isa::avx2 && !cpu_has_avx2())
      throw std::invalid_argument("TSGAUDIT_KERNEL=avx2 but the CPU or build lacks AVX2/FMA");
    return wanted;
  }
  return detect_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "auto") return detect_isa();
  throw std::invalid_argument("unknown kernel variant `" + std::string(name) + "`");
}

Isa detect_isa() { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return active().load(); }

void set_active_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2())
    throw std::invalid_argument("AVX2 kernel unavailable on this CPU or build");
  active().store(isa);
}

GaussianSumFn resolve(Isa isa) {
  switch (isa) {
    case Isa::avx2:
#if defined(TSGAUDIT_HAVE_AVX2)
      return &gaussian_sum_avx2;
#else
      break;
#endif
    case Isa::scalar:
      return &gaussian_sum_scalar;
  }
  return &gaussian_sum_scalar;
}

void gaussian_sum(PointView points, double scale_s, double scale_e, std::span<const double> qs,
                  std::span<const double> qe, std::span<double> out) {
  resolve(active_isa())(points, scale_s, scale_e, qs, qe, out);
}

}  // namespace tsgaudit::kernels
