#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace tsgaudit::kernels {

/// Instruction-set variants of the Gaussian-sum kernel.
enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Structure-of-arrays view of the KDE support points.
struct PointView {
  std::span<const double> s;
  std::span<const double> e;
};

/// For every query q, writes
///   out[q] = sum_i exp(-(qs - ps_i)^2 * scale_s - (qe - pe_i)^2 * scale_e)
/// summed in point order within each lane. scale_* = 1 / (2 h_*^2).
using GaussianSumFn = void (*)(PointView points, double scale_s, double scale_e,
                               std::span<const double> qs, std::span<const double> qe,
                               std::span<double> out);

/// Reference implementation: plain loop over std::exp.
void gaussian_sum_scalar(PointView points, double scale_s, double scale_e,
                         std::span<const double> qs, std::span<const double> qe,
                         std::span<double> out);

#if defined(TSGAUDIT_HAVE_AVX2)
/// AVX2+FMA variant; four points per step with a polynomial exp. Matches the
/// scalar kernel to ~1e-15 relative per term.
void gaussian_sum_avx2(PointView points, double scale_s, double scale_e,
                       std::span<const double> qs, std::span<const double> qe,
                       std::span<double> out);
#endif

/// Best variant the running CPU supports.
Isa detect_isa();

/// Variant used by gaussian_sum(). Defaults to detect_isa(), or to the value
/// of TSGAUDIT_KERNEL (`scalar`/`avx2`) when that is set.
Isa active_isa();

/// Forces a variant. Throws std::invalid_argument if the CPU or build lacks it.
void set_active_isa(Isa isa);

/// Parses `scalar`, `avx2` or `auto`.
Isa parse_isa(std::string_view name);

GaussianSumFn resolve(Isa isa);

/// Dispatches to the active variant.
void gaussian_sum(PointView points, double scale_s, double scale_e, std::span<const double> qs,
                  std::span<const double> qe, std::span<double> out);

}  // namespace tsgaudit::kernels
