#pragma once

#include <Eigen/Core>
#include <utility>

#include "rd2d/multi_index.hpp"
#include "rd2d/types.hpp"
#include "rd2d/wls.hpp"

namespace rd2d {

/// One per-cutoff, per-group bivariate local polynomial fit. Regressors are
/// bandwidth-scaled offsets ((X1-x1)/h1, (X2-x2)/h2); the coefficient of the
/// monomial u1^k1 u2^k2 therefore equals h1^k1 h2^k2 times the raw-offset
/// coefficient, and the fitted value / residuals are identical under either
/// parameterization.
struct LocalFit {
  WlsFit wls;
  double x1 = 0.0, x2 = 0.0;
  double h1 = 0.0, h2 = 0.0;  // bandwidths actually applied (post-guards)
  int p = 0;
  int group = 0;
  int cutoff_index = -1;

  /// nu-th partial derivative estimate: nu! * beta[pos(nu)] / h^nu.
  double derivative(int nu1, int nu2) const;
  /// Scale from scaled coefficient at deriv position to the estimand.
  double deriv_scale(int nu1, int nu2) const;
};

LocalFit fit_local(const Dataset& data, double x1, double x2, int group, double h1, double h2,
                   int p, Kernel kernel, KernelType type, int cutoff_index = -1,
                   const char* path = "location");

/// Gram matrix assembled independently of fit_local (1/n sum of scaled basis
/// outer products times kernel weights over the group).
Eigen::MatrixXd gram_matrix(const Dataset& data, double x1, double x2, int group, double h1,
                            double h2, int p, Kernel kernel, KernelType type);

/// theta vector for a multi-index k with |k| = p+1:
/// (1/n) sum r_p(v_i) v_i^k K_h(u_i) over the group, v_i the scaled offset.
Eigen::VectorXd theta_vector(const Dataset& data, double x1, double x2, int group, double h1,
                             double h2, int p, Kernel kernel, KernelType type,
                             const MultiIndex& k);

/// Counts of strictly positive kernel weight per group.
std::pair<int, int> effective_counts(const LocalFit& fit0, const LocalFit& fit1);

}  // namespace rd2d
