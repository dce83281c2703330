#include "rd2d/wls.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace rd2d {

std::string FitContext::describe() const {
  std::ostringstream os;
  if (*path) os << path << " ";
  os << "fit";
  if (cutoff_index >= 0) os << " at cutoff " << (cutoff_index + 1);
  if (group >= 0) os << ", group " << group;
  return os.str();
}

WlsFit solve_wls(Eigen::MatrixXd rows, Eigen::VectorXd weights, Eigen::VectorXd y,
                 std::vector<std::int64_t> idx, double n_total, const FitContext& ctx) {
  WlsFit fit;
  fit.rows = std::move(rows);
  fit.weights = std::move(weights);
  fit.y = std::move(y);
  fit.idx = std::move(idx);
  fit.n_eff = static_cast<int>(fit.rows.rows());
  fit.n_total = n_total;

  const int dim = static_cast<int>(fit.rows.cols());
  if (fit.n_eff < dim)
    throw NumericalError("singular Gram matrix (" + std::to_string(fit.n_eff) +
                         " in-kernel points for " + std::to_string(dim) +
                         " basis terms) in " + ctx.describe());

  Eigen::MatrixXd wrows = fit.weights.asDiagonal() * fit.rows;
  fit.gram = (fit.rows.transpose() * wrows) / n_total;
  fit.gram = 0.5 * (fit.gram + fit.gram.transpose().eval());
  Eigen::VectorXd rhs = (wrows.transpose() * fit.y) / n_total;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(fit.gram);
  bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
  double cond = 0.0;
  if (ok) {
    double dmax = ldlt.vectorD().cwiseAbs().maxCoeff();
    double dmin = ldlt.vectorD().cwiseAbs().minCoeff();
    cond = (dmin > 0.0) ? dmax / dmin : std::numeric_limits<double>::infinity();
    ok = std::isfinite(cond) && cond <= 1e12;
  }
  if (ok) {
    fit.beta = ldlt.solve(rhs);
    fit.gram_inv = ldlt.solve(Eigen::MatrixXd::Identity(dim, dim));
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fit.gram);
    qr.setThreshold(1e-14);
    if (qr.rank() < dim)
      throw NumericalError("singular Gram matrix in " + ctx.describe());
    fit.beta = qr.solve(rhs);
    fit.gram_inv = qr.solve(Eigen::MatrixXd::Identity(dim, dim));
    fit.used_qr_fallback = true;
  }

  fit.residuals = fit.y - fit.rows * fit.beta;
  fit.leverage.resize(fit.n_eff);
  for (int i = 0; i < fit.n_eff; ++i) {
    fit.leverage(i) =
        fit.weights(i) * fit.rows.row(i).dot(fit.gram_inv * fit.rows.row(i).transpose()) /
        n_total;
  }
  return fit;
}

}  // namespace rd2d
