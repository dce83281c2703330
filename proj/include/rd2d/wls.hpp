#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "rd2d/types.hpp"

namespace rd2d {

/// Identifies a fit in error messages: which cutoff, group, and path failed.
struct FitContext {
  int cutoff_index = -1;  // 0-based, -1 when not tied to a cutoff
  int group = -1;
  const char* path = "";  // "location" / "distance" / "pilot"

  std::string describe() const;
};

/// Weighted least squares solution on kernel-localized, bandwidth-scaled
/// regressors. gram is (1/n_total) * R' diag(w) R; beta solves the weighted
/// normal equations; leverage[i] = w_i r_i' gram_inv r_i / n_total.
struct WlsFit {
  Eigen::MatrixXd rows;       // n_eff x dim scaled basis rows
  Eigen::VectorXd weights;    // kernel weights, strictly positive
  Eigen::VectorXd y;          // outcomes of in-kernel units
  std::vector<std::int64_t> idx;  // original row indices, ascending
  Eigen::MatrixXd gram, gram_inv;
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
  Eigen::VectorXd leverage;
  int n_eff = 0;
  double n_total = 0.0;
  bool used_qr_fallback = false;

  double fitted_at(int pos) const { return beta(pos); }
};

/// Solves the weighted normal equations. Uses an LDLT factorization of the
/// Gram matrix, falling back to column-pivoted QR when the estimated
/// condition number exceeds 1e12. Throws NumericalError when the Gram matrix
/// is singular even then.
WlsFit solve_wls(Eigen::MatrixXd rows, Eigen::VectorXd weights, Eigen::VectorXd y,
                 std::vector<std::int64_t> idx, double n_total, const FitContext& ctx);

}  // namespace rd2d
