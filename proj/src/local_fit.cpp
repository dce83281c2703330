#include "rd2d/local_fit.hpp"

#include <cmath>

#include "rd2d/kernel.hpp"

namespace rd2d {

double LocalFit::deriv_scale(int nu1, int nu2) const {
  MultiIndex nu{nu1, nu2};
  return multi_factorial(nu) / (std::pow(h1, nu1) * std::pow(h2, nu2));
}

double LocalFit::derivative(int nu1, int nu2) const {
  MultiIndexSet mis(p);
  int pos = mis.position(nu1, nu2);
  if (pos < 0) throw ValidationError("derivative order exceeds fit order");
  return deriv_scale(nu1, nu2) * wls.beta(pos);
}

LocalFit fit_local(const Dataset& data, double x1, double x2, int group, double h1, double h2,
                   int p, Kernel kernel, KernelType type, int cutoff_index, const char* path) {
  MultiIndexSet mis(p);
  const int dim = mis.dim();
  const std::size_t n = data.n();

  std::vector<std::int64_t> idx;
  std::vector<double> w;
  idx.reserve(64);
  w.reserve(64);
  for (std::size_t i = 0; i < n; ++i) {
    if (data.t[i] != static_cast<std::uint8_t>(group)) continue;
    double kw = kernel_weight(data.x1[i] - x1, data.x2[i] - x2, h1, h2, kernel, type);
    if (kw > 0.0) {
      idx.push_back(static_cast<std::int64_t>(i));
      w.push_back(kw);
    }
  }

  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd rows(m, dim);
  Eigen::VectorXd weights(m), y(m), basis_row(dim);
  for (int r = 0; r < m; ++r) {
    std::size_t i = static_cast<std::size_t>(idx[static_cast<std::size_t>(r)]);
    basis_biv((data.x1[i] - x1) / h1, (data.x2[i] - x2) / h2, mis, basis_row.data());
    rows.row(r) = basis_row;
    weights(r) = w[static_cast<std::size_t>(r)];
    y(r) = data.y[i];
  }

  FitContext ctx{cutoff_index, group, path};
  LocalFit fit;
  fit.wls = solve_wls(std::move(rows), std::move(weights), std::move(y), std::move(idx),
                      static_cast<double>(n), ctx);
  fit.x1 = x1;
  fit.x2 = x2;
  fit.h1 = h1;
  fit.h2 = h2;
  fit.p = p;
  fit.group = group;
  fit.cutoff_index = cutoff_index;
  return fit;
}

Eigen::MatrixXd gram_matrix(const Dataset& data, double x1, double x2, int group, double h1,
                            double h2, int p, Kernel kernel, KernelType type) {
  MultiIndexSet mis(p);
  const int dim = mis.dim();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd r(dim);
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.t[i] != static_cast<std::uint8_t>(group)) continue;
    double kw = kernel_weight(data.x1[i] - x1, data.x2[i] - x2, h1, h2, kernel, type);
    if (kw <= 0.0) continue;
    basis_biv((data.x1[i] - x1) / h1, (data.x2[i] - x2) / h2, mis, r.data());
    gram.noalias() += kw * (r * r.transpose());
  }
  return gram / static_cast<double>(data.n());
}

Eigen::VectorXd theta_vector(const Dataset& data, double x1, double x2, int group, double h1,
                             double h2, int p, Kernel kernel, KernelType type,
                             const MultiIndex& k) {
  if (k.order() != p + 1)
    throw ValidationError("theta_vector requires a multi-index of order p+1");
  MultiIndexSet mis(p);
  const int dim = mis.dim();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd r(dim);
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.t[i] != static_cast<std::uint8_t>(group)) continue;
    double kw = kernel_weight(data.x1[i] - x1, data.x2[i] - x2, h1, h2, kernel, type);
    if (kw <= 0.0) continue;
    double v1 = (data.x1[i] - x1) / h1, v2 = (data.x2[i] - x2) / h2;
    basis_biv(v1, v2, mis, r.data());
    theta.noalias() += (kw * std::pow(v1, k.k1) * std::pow(v2, k.k2)) * r;
  }
  return theta / static_cast<double>(data.n());
}

std::pair<int, int> effective_counts(const LocalFit& fit0, const LocalFit& fit1) {
  return {fit0.wls.n_eff, fit1.wls.n_eff};
}

}  // namespace rd2d
