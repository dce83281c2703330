#pragma once

#include <Eigen/Core>
#include <vector>

#include "rd2d/types.hpp"
#include "rd2d/wls.hpp"

namespace rd2d {

struct SandwichSpec {
  Vce vce = Vce::hc1;
  bool cluster_on = false;
};

/// Per-unit multiplicative residual adjustments. Applying them to residuals
/// before squaring reproduces the HC0-HC3 meat weightings (1,
/// n_eff/(n_eff-dim), 1/(1-l), 1/(1-l)^2) and keeps pointwise and
/// cross-cutoff assemblies consistent at j = k. Under clustering the
/// degrees-of-freedom correction moves to the G/(G-1) factor instead.
Eigen::VectorXd residual_adjustments(const WlsFit& fit, const SandwichSpec& spec);

/// Small-cluster factor: G/(G-1) when vce = hc1 and clustering is on.
double cluster_factor(int n_clusters, const SandwichSpec& spec);

/// Middle matrix of the sandwich: (lead_scale/n) sum_i r r' w^2 eps~^2 for HC
/// variants, or the cluster-summed score outer product for cluster-robust
/// variance. lead_scale is h1*h2 on the location path and h^2 on the distance
/// path. cluster holds dense ids for all n rows (nullptr when unused).
Eigen::MatrixXd sigma_meat(const WlsFit& fit, const SandwichSpec& spec, double lead_scale,
                           const std::vector<int>* cluster);

/// e_s' gram_inv meat gram_inv e_s, clamped at zero.
double variance_scalar(const WlsFit& fit, const Eigen::MatrixXd& meat, int selector_pos);

struct CrossCovariance {
  Eigen::MatrixXd cov;        // J x J covariance of the estimates; diag = se^2
  Eigen::MatrixXd corr;       // PSD-repaired correlation matrix
  Eigen::MatrixXd corr_sqrt;  // symmetric square root of corr
  bool repaired = false;      // true when negative eigenvalues were clipped
};

/// Cross-cutoff covariance of the treatment effect estimates built from the
/// per-group fits at every cutoff. scale_t[j] maps the selected coefficient
/// to the estimand (1 for the level, the factorial/bandwidth factor for
/// derivatives). Each kernel product uses its own cutoff's bandwidths; the
/// leading bandwidth factors cancel against the variance scaling, so the
/// j = k diagonal reproduces the pointwise variance exactly.
CrossCovariance cross_covariance(const std::vector<const WlsFit*>& fits0,
                                 const std::vector<const WlsFit*>& fits1,
                                 const std::vector<double>& scale0,
                                 const std::vector<double>& scale1, int selector_pos,
                                 const SandwichSpec& spec, const std::vector<int>* cluster,
                                 double n);

}  // namespace rd2d
