#include "pointer_kernel.hpp"

#include <algorithm>
#include <cmath>

namespace obsent::pointer::detail {

AxisSums last_axis_sums(std::size_t dim, std::size_t n, const double* g, const double* weight, const double* a,
                        const double* c, double* scratch) {
  double* p = scratch;
  double* v = scratch + n;
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = a[0] * g[j];
    v[j] = c[0] * g[j];
  }
  for (std::size_t m = 1; m < dim; ++m) {
    const double* gm = g + m * n;
    for (std::size_t j = 0; j < n; ++j) {
      p[j] += a[m] * gm[j];
      v[j] += c[m] * gm[j];
    }
  }
  double s = 0.0;
  double np = 0.0;
  double nv = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double pj = std::max(p[j], 1e-300);
    const double vj = std::max(v[j], 1e-300);
    s -= weight[j] * p[j] * std::log(pj / vj);
    np += weight[j] * p[j];
    nv += weight[j] * v[j];
  }
  return {s, np, nv};
}

}  // namespace obsent::pointer::detail
