#include "rd2d/kernel.hpp"

#include <cmath>

namespace rd2d {

double kernel1d(Kernel k, double v) {
  double a = std::fabs(v);
  switch (k) {
    case Kernel::triangular:
      return a < 1.0 ? 1.0 - a : 0.0;
    case Kernel::epanechnikov:
      return a <= 1.0 ? 0.75 * (1.0 - v * v) : 0.0;
    case Kernel::uniform:
      return a <= 1.0 ? 0.5 : 0.0;
  }
  return 0.0;
}

double kernel_weight(double u1, double u2, double h1, double h2, Kernel k, KernelType type) {
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw ValidationError("kernel_weight: non-positive bandwidth");
  double v1 = u1 / h1, v2 = u2 / h2;
  double shape;
  if (type == KernelType::prod) {
    shape = kernel1d(k, v1) * kernel1d(k, v2);
  } else {
    shape = kernel1d(k, std::sqrt(v1 * v1 + v2 * v2));
  }
  return shape / (h1 * h2);
}

double kernel_weight_dist(double d, double h, Kernel k) {
  if (!(h > 0.0)) throw ValidationError("kernel_weight_dist: non-positive bandwidth");
  return kernel1d(k, d / h) / (h * h);
}

void basis_biv(double u1, double u2, const MultiIndexSet& mis, double* out) {
  // Powers up to the set order, then monomials in set order.
  double pow1[16], pow2[16];
  int p = mis.order();
  pow1[0] = pow2[0] = 1.0;
  for (int d = 1; d <= p; ++d) {
    pow1[d] = pow1[d - 1] * u1;
    pow2[d] = pow2[d - 1] * u2;
  }
  const auto& idx = mis.indices();
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = pow1[idx[i].k1] * pow2[idx[i].k2];
}

Eigen::VectorXd basis_biv(double u1, double u2, int p) {
  MultiIndexSet mis(p);
  Eigen::VectorXd out(mis.dim());
  basis_biv(u1, u2, mis, out.data());
  return out;
}

void basis_uni(double u, int p, double* out) {
  out[0] = 1.0;
  for (int d = 1; d <= p; ++d) out[d] = out[d - 1] * u;
}

Eigen::VectorXd basis_uni(double u, int p) {
  Eigen::VectorXd out(p + 1);
  basis_uni(u, p, out.data());
  return out;
}

}  // namespace rd2d
