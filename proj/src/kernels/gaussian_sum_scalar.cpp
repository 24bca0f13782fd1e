#include <cmath>

#include "tsgaudit/kernels.hpp"

namespace tsgaudit::kernels {

void gaussian_sum_scalar(PointView points, double scale_s, double scale_e,
                         std::span<const double> qs, std::span<const double> qe,
                         std::span<double> out) {
  const std::size_t n = points.s.size();
  const double* ps = points.s.data();
  const double* pe = points.e.data();
  for (std::size_t q = 0; q < qs.size(); ++q) {
    const double xs = qs[q];
    const double xe = qe[q];
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ds = xs - ps[i];
      const double de = xe - pe[i];
      acc += std::exp(-(ds * ds * scale_s + de * de * scale_e));
    }
    out[q] = acc;
  }
}

}  // namespace tsgaudit::kernels
