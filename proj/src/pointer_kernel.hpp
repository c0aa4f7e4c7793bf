#pragma once

#include <cstddef>

namespace obsent::pointer::detail {

struct AxisSums {
  double entropy = 0.0;
  double norm_p = 0.0;
  double norm_v = 0.0;
};

/// Sums over the last axis of repeated measurements for one prefix:
/// p_j = sum_m a[m] g[m n + j], v_j = sum_m c[m] g[m n + j], and
/// -sum_j w_j p_j ln(p_j / v_j) with the matching trapezoid norms.
/// `scratch` holds 2 n doubles.
AxisSums last_axis_sums(std::size_t dim, std::size_t n, const double* g, const double* weight, const double* a,
                        const double* c, double* scratch);

}  // namespace obsent::pointer::detail
