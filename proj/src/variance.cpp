#include "rd2d/variance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace rd2d {

Eigen::VectorXd residual_adjustments(const WlsFit& fit, const SandwichSpec& spec) {
  Eigen::VectorXd f = Eigen::VectorXd::Ones(fit.n_eff);
  const int dim = static_cast<int>(fit.rows.cols());
  switch (spec.vce) {
    case Vce::hc0:
      break;
    case Vce::hc1:
      if (!spec.cluster_on) {
        if (fit.n_eff <= dim)
          throw NumericalError("hc1 requires more in-kernel points than basis terms");
        f.setConstant(std::sqrt(static_cast<double>(fit.n_eff) /
                                static_cast<double>(fit.n_eff - dim)));
      }
      break;
    case Vce::hc2:
    case Vce::hc3:
      for (int i = 0; i < fit.n_eff; ++i) {
        double l = fit.leverage(i);
        if (l >= 1.0 - 1e-12)
          throw NumericalError("leverage one at data row " + std::to_string(fit.idx[static_cast<std::size_t>(i)]) +
                               " (exact interpolation point); hc2/hc3 undefined");
        f(i) = (spec.vce == Vce::hc2) ? 1.0 / std::sqrt(1.0 - l) : 1.0 / (1.0 - l);
      }
      break;
  }
  return f;
}

double cluster_factor(int n_clusters, const SandwichSpec& spec) {
  if (!spec.cluster_on || spec.vce != Vce::hc1) return 1.0;
  if (n_clusters < 2) throw NumericalError("cluster-robust variance needs at least 2 clusters");
  return static_cast<double>(n_clusters) / static_cast<double>(n_clusters - 1);
}

Eigen::MatrixXd sigma_meat(const WlsFit& fit, const SandwichSpec& spec, double lead_scale,
                           const std::vector<int>* cluster) {
  const int dim = static_cast<int>(fit.rows.cols());
  Eigen::VectorXd adj = residual_adjustments(fit, spec);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(dim, dim);

  if (spec.cluster_on) {
    if (cluster == nullptr) throw ValidationError("cluster variance requested without labels");
    std::unordered_map<int, Eigen::VectorXd> scores;
    for (int i = 0; i < fit.n_eff; ++i) {
      int g = (*cluster)[static_cast<std::size_t>(fit.idx[static_cast<std::size_t>(i)])];
      auto [it, fresh] = scores.try_emplace(g, Eigen::VectorXd::Zero(dim));
      it->second.noalias() +=
          (fit.weights(i) * fit.residuals(i) * adj(i)) * fit.rows.row(i).transpose();
    }
    for (const auto& [g, s] : scores) meat.noalias() += s * s.transpose();
    meat *= cluster_factor(static_cast<int>(scores.size()), spec);
  } else {
    for (int i = 0; i < fit.n_eff; ++i) {
      double e = fit.residuals(i) * adj(i);
      meat.noalias() +=
          (fit.weights(i) * fit.weights(i) * e * e) * (fit.rows.row(i).transpose() * fit.rows.row(i));
    }
  }
  return meat * (lead_scale / fit.n_total);
}

double variance_scalar(const WlsFit& fit, const Eigen::MatrixXd& meat, int selector_pos) {
  Eigen::VectorXd u = fit.gram_inv.col(selector_pos);
  double v = u.dot(meat * u);
  return std::max(v, 0.0);
}

namespace {

// Per-fit selector scores: a_i = (gram_inv e_s . r_i) w_i eps~_i, so
// e' G_j^-1 M_jk G_k^-1 e = sum_i a_i^(j) a_i^(k) over shared units.
Eigen::VectorXd selector_scores(const WlsFit& fit, const SandwichSpec& spec, int selector_pos) {
  Eigen::VectorXd adj = residual_adjustments(fit, spec);
  Eigen::VectorXd u = fit.gram_inv.col(selector_pos);
  Eigen::VectorXd a(fit.n_eff);
  for (int i = 0; i < fit.n_eff; ++i)
    a(i) = fit.rows.row(i).dot(u) * fit.weights(i) * fit.residuals(i) * adj(i);
  return a;
}

double cross_term(const WlsFit& fj, const Eigen::VectorXd& aj, const WlsFit& fk,
                  const Eigen::VectorXd& ak, const SandwichSpec& spec,
                  const std::vector<int>* cluster) {
  if (spec.cluster_on) {
    if (cluster == nullptr) throw ValidationError("cluster variance requested without labels");
    std::unordered_map<int, std::pair<double, double>> sums;
    for (int i = 0; i < fj.n_eff; ++i)
      sums[(*cluster)[static_cast<std::size_t>(fj.idx[static_cast<std::size_t>(i)])]].first += aj(i);
    for (int i = 0; i < fk.n_eff; ++i)
      sums[(*cluster)[static_cast<std::size_t>(fk.idx[static_cast<std::size_t>(i)])]].second += ak(i);
    double total = 0.0;
    for (const auto& [g, s] : sums) total += s.first * s.second;
    return total * cluster_factor(static_cast<int>(sums.size()), spec);
  }
  // Two-pointer walk over the sorted original indices.
  double total = 0.0;
  int i = 0, j = 0;
  while (i < fj.n_eff && j < fk.n_eff) {
    if (fj.idx[static_cast<std::size_t>(i)] < fk.idx[static_cast<std::size_t>(j)])
      ++i;
    else if (fj.idx[static_cast<std::size_t>(i)] > fk.idx[static_cast<std::size_t>(j)])
      ++j;
    else
      total += aj(i++) * ak(j++);
  }
  return total;
}

}  // namespace

CrossCovariance cross_covariance(const std::vector<const WlsFit*>& fits0,
                                 const std::vector<const WlsFit*>& fits1,
                                 const std::vector<double>& scale0,
                                 const std::vector<double>& scale1, int selector_pos,
                                 const SandwichSpec& spec, const std::vector<int>* cluster,
                                 double n) {
  const int J = static_cast<int>(fits0.size());
  if (static_cast<int>(fits1.size()) != J || static_cast<int>(scale0.size()) != J ||
      static_cast<int>(scale1.size()) != J)
    throw ValidationError("cross_covariance: dimension mismatch across cutoffs");

  std::vector<Eigen::VectorXd> a0(static_cast<std::size_t>(J)), a1(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    a0[static_cast<std::size_t>(j)] = selector_scores(*fits0[static_cast<std::size_t>(j)], spec, selector_pos);
    a1[static_cast<std::size_t>(j)] = selector_scores(*fits1[static_cast<std::size_t>(j)], spec, selector_pos);
  }

  CrossCovariance out;
  out.cov = Eigen::MatrixXd::Zero(J, J);
  const double inv_n2 = 1.0 / (n * n);
  for (int j = 0; j < J; ++j) {
    for (int k = j; k < J; ++k) {
      double c0 = cross_term(*fits0[static_cast<std::size_t>(j)], a0[static_cast<std::size_t>(j)],
                             *fits0[static_cast<std::size_t>(k)], a0[static_cast<std::size_t>(k)], spec, cluster);
      double c1 = cross_term(*fits1[static_cast<std::size_t>(j)], a1[static_cast<std::size_t>(j)],
                             *fits1[static_cast<std::size_t>(k)], a1[static_cast<std::size_t>(k)], spec, cluster);
      double v = (scale0[static_cast<std::size_t>(j)] * scale0[static_cast<std::size_t>(k)] * c0 +
                  scale1[static_cast<std::size_t>(j)] * scale1[static_cast<std::size_t>(k)] * c1) *
                 inv_n2;
      out.cov(j, k) = v;
      out.cov(k, j) = v;
    }
  }

  for (int j = 0; j < J; ++j)
    if (!(out.cov(j, j) > 0.0))
      throw NumericalError("degenerate cutoff " + std::to_string(j + 1) +
                           ": zero variance in cross-covariance");

  Eigen::VectorXd d = out.cov.diagonal().cwiseSqrt();
  out.corr = out.cov.array() / (d * d.transpose()).array();
  for (int j = 0; j < J; ++j) out.corr(j, j) = 1.0;
  out.corr = 0.5 * (out.corr + out.corr.transpose().eval());

  // PSD repair: clip negative eigenvalues, restore the unit diagonal.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.corr);
  if (es.info() != Eigen::Success) throw NumericalError("eigen decomposition of correlation failed");
  Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -1e-12) out.repaired = true;
  Eigen::VectorXd clipped = ev.cwiseMax(0.0);
  Eigen::MatrixXd fixed = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd fd = fixed.diagonal();
  for (int j = 0; j < J; ++j)
    if (!(fd(j) > 0.0))
      throw NumericalError("degenerate cutoff " + std::to_string(j + 1) +
                           " after PSD repair of the correlation matrix");
  Eigen::VectorXd scale = fd.cwiseSqrt().cwiseInverse();
  out.corr = scale.asDiagonal() * fixed * scale.asDiagonal();
  for (int j = 0; j < J; ++j) out.corr(j, j) = 1.0;
  out.corr = 0.5 * (out.corr + out.corr.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(out.corr);
  Eigen::VectorXd sq = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  out.corr_sqrt = es2.eigenvectors() * sq.asDiagonal() * es2.eigenvectors().transpose();
  return out;
}

}  // namespace rd2d
