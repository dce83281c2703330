#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

std::uint64_t Rng::next() {
  state ^= state << 13;
  state ^= state >> 7;
  state ^= state << 17;
  return state;
}

double Rng::unif() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = unif(), u2 = unif();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-300) throw std::runtime_error("oracle: singular system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
    x[ri] = s / a[ri][ri];
  }
  return x;
}

double kernel1d(rd2d::Kernel k, double v) {
  double a = std::fabs(v);
  if (k == rd2d::Kernel::triangular) return a < 1.0 ? 1.0 - a : 0.0;
  if (k == rd2d::Kernel::epanechnikov) return a <= 1.0 ? 0.75 * (1.0 - v * v) : 0.0;
  return a <= 1.0 ? 0.5 : 0.0;
}

double weight_biv(double u1, double u2, double h1, double h2, rd2d::Kernel k,
                  rd2d::KernelType t) {
  double v1 = u1 / h1, v2 = u2 / h2;
  double shape = (t == rd2d::KernelType::prod)
                     ? kernel1d(k, v1) * kernel1d(k, v2)
                     : kernel1d(k, std::sqrt(v1 * v1 + v2 * v2));
  return shape / (h1 * h2);
}

double weight_dist(double d, double h, rd2d::Kernel k) { return kernel1d(k, d / h) / (h * h); }

namespace {

std::vector<double> monomials_biv(double u1, double u2, int p) {
  rd2d::MultiIndexSet mis(p);
  std::vector<double> out;
  for (const auto& mi : mis.indices()) out.push_back(std::pow(u1, mi.k1) * std::pow(u2, mi.k2));
  return out;
}

RawFit wls_raw(const std::vector<std::vector<double>>& rows, const std::vector<double>& w,
               const std::vector<double>& y, std::vector<long> idx) {
  const std::size_t dim = rows.empty() ? 0 : rows[0].size();
  std::vector<std::vector<double>> xtx(dim, std::vector<double>(dim, 0.0));
  std::vector<double> xty(dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) xtx[a][b] += w[i] * rows[i][a] * rows[i][b];
      xty[a] += w[i] * rows[i][a] * y[i];
    }
  }
  RawFit fit;
  fit.beta = solve_dense(xtx, xty);
  fit.weights = w;
  fit.idx = std::move(idx);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double yhat = 0.0;
    for (std::size_t a = 0; a < dim; ++a) yhat += rows[i][a] * fit.beta[a];
    fit.residuals.push_back(y[i] - yhat);
  }
  fit.fitted.push_back(fit.beta[0]);
  return fit;
}

}  // namespace

RawFit fit_biv_raw(const rd2d::Dataset& data, double x1, double x2, int group, double h1,
                   double h2, int p, rd2d::Kernel k, rd2d::KernelType kt) {
  std::vector<std::vector<double>> rows;
  std::vector<double> w, y;
  std::vector<long> idx;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.t[i] != static_cast<std::uint8_t>(group)) continue;
    double kw = weight_biv(data.x1[i] - x1, data.x2[i] - x2, h1, h2, k, kt);
    if (kw <= 0.0) continue;
    rows.push_back(monomials_biv(data.x1[i] - x1, data.x2[i] - x2, p));
    w.push_back(kw);
    y.push_back(data.y[i]);
    idx.push_back(static_cast<long>(i));
  }
  return wls_raw(rows, w, y, std::move(idx));
}

RawFit fit_dist_raw(const std::vector<double>& d, const std::vector<double>& y, int side,
                    double h, int p, rd2d::Kernel k) {
  std::vector<std::vector<double>> rows;
  std::vector<double> w, yy;
  std::vector<long> idx;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if ((side == 1) != (d[i] >= 0.0)) continue;
    double kw = weight_dist(d[i], h, k);
    if (kw <= 0.0) continue;
    std::vector<double> row;
    for (int a = 0; a <= p; ++a) row.push_back(std::pow(d[i], a));
    rows.push_back(row);
    w.push_back(kw);
    yy.push_back(y[i]);
    idx.push_back(static_cast<long>(i));
  }
  return wls_raw(rows, w, yy, std::move(idx));
}

std::vector<std::vector<double>> gram_naive(const rd2d::Dataset& data, double x1, double x2,
                                            int group, double h1, double h2, int p,
                                            rd2d::Kernel k, rd2d::KernelType kt) {
  rd2d::MultiIndexSet mis(p);
  const std::size_t dim = static_cast<std::size_t>(mis.dim());
  std::vector<std::vector<double>> g(dim, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.t[i] != static_cast<std::uint8_t>(group)) continue;
    double kw = weight_biv(data.x1[i] - x1, data.x2[i] - x2, h1, h2, k, kt);
    if (kw <= 0.0) continue;
    std::vector<double> r = monomials_biv((data.x1[i] - x1) / h1, (data.x2[i] - x2) / h2, p);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) g[a][b] += kw * r[a] * r[b];
  }
  for (auto& row : g)
    for (auto& v : row) v /= static_cast<double>(data.n());
  return g;
}

std::vector<double> theta_naive(const rd2d::Dataset& data, double x1, double x2, int group,
                                double h1, double h2, int p, rd2d::Kernel k, rd2d::KernelType kt,
                                rd2d::MultiIndex kk) {
  rd2d::MultiIndexSet mis(p);
  std::vector<double> theta(static_cast<std::size_t>(mis.dim()), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.t[i] != static_cast<std::uint8_t>(group)) continue;
    double kw = weight_biv(data.x1[i] - x1, data.x2[i] - x2, h1, h2, k, kt);
    if (kw <= 0.0) continue;
    double v1 = (data.x1[i] - x1) / h1, v2 = (data.x2[i] - x2) / h2;
    std::vector<double> r = monomials_biv(v1, v2, p);
    double mono = std::pow(v1, kk.k1) * std::pow(v2, kk.k2);
    for (std::size_t a = 0; a < theta.size(); ++a) theta[a] += kw * mono * r[a];
  }
  for (auto& v : theta) v /= static_cast<double>(data.n());
  return theta;
}

std::vector<std::vector<double>> meat_hc0_naive(const rd2d::Dataset& data, double x1, double x2,
                                                int group, double h1, double h2, int p,
                                                rd2d::Kernel k, rd2d::KernelType kt,
                                                const std::vector<double>& residuals_by_row) {
  rd2d::MultiIndexSet mis(p);
  const std::size_t dim = static_cast<std::size_t>(mis.dim());
  std::vector<std::vector<double>> m(dim, std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.t[i] != static_cast<std::uint8_t>(group)) continue;
    double kw = weight_biv(data.x1[i] - x1, data.x2[i] - x2, h1, h2, k, kt);
    if (kw <= 0.0) continue;
    std::vector<double> r = monomials_biv((data.x1[i] - x1) / h1, (data.x2[i] - x2) / h2, p);
    double e = residuals_by_row[i];
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) m[a][b] += kw * kw * e * e * r[a] * r[b];
  }
  for (auto& row : m)
    for (auto& v : row) v *= (h1 * h2) / static_cast<double>(data.n());
  return m;
}

rd2d::Dataset random_dataset(std::size_t n, std::uint64_t seed, double noise) {
  Rng rng(seed);
  rd2d::Dataset data;
  for (std::size_t i = 0; i < n; ++i) {
    double x1 = 2.0 * rng.unif() - 1.0;
    double x2 = 2.0 * rng.unif() - 1.0;
    bool treated = x1 >= 0.0;
    double mean = treated ? 0.5 + 0.3 * x1 - 0.2 * x2 + 0.4 * x1 * x2
                          : -0.1 + 0.2 * x1 + 0.1 * x2 - 0.3 * x2 * x2;
    data.x1.push_back(x1);
    data.x2.push_back(x2);
    data.t.push_back(treated ? 1 : 0);
    data.y.push_back(mean + noise * rng.normal());
  }
  return data;
}

}  // namespace oracle
