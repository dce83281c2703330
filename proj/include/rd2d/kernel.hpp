#pragma once

#include <Eigen/Core>

#include "rd2d/multi_index.hpp"
#include "rd2d/types.hpp"

namespace rd2d {

/// Unnormalized univariate kernel shapes on [-1,1]:
/// triangular (1-|v|)+, epanechnikov 0.75(1-v^2)+, uniform 0.5*1(|v|<=1).
double kernel1d(Kernel k, double v);

/// Bivariate kernel weight for an offset u = X_i - x with bandwidths (h1,h2):
/// prod: k(u1/h1) k(u2/h2) / (h1 h2); rad: k(||(u1/h1, u2/h2)||) / (h1 h2).
/// Kernels are not normalized to integrate to one; the 1/(h1 h2) factor is
/// kept so assembled matrices match their bandwidth-scaled definitions.
double kernel_weight(double u1, double u2, double h1, double h2, Kernel k, KernelType type);

/// Univariate kernel weight k(d/h) / h^2 used on signed distances. The h^2
/// normalization keeps the assembled matrices on the same scale as the
/// bivariate path (points within h of a boundary point scale with h^2).
double kernel_weight_dist(double d, double h, Kernel k);

/// Bivariate monomial basis in MultiIndexSet order, evaluated at (u1,u2).
void basis_biv(double u1, double u2, const MultiIndexSet& mis, double* out);
Eigen::VectorXd basis_biv(double u1, double u2, int p);

/// Univariate basis (1, u, ..., u^p).
void basis_uni(double u, int p, double* out);
Eigen::VectorXd basis_uni(double u, int p);

}  // namespace rd2d
