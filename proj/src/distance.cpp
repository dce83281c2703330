#include "rd2d/distance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rd2d/bandwidth.hpp"
#include "rd2d/guards.hpp"
#include "rd2d/inference.hpp"
#include "rd2d/kernel.hpp"
#include "rd2d/parallel.hpp"
#include "rd2d/rng.hpp"

namespace rd2d {

DistanceMatrix build_distances(const Dataset& data, const CutoffGrid& grid) {
  if (grid.size() == 0) throw ValidationError("empty cutoff grid");
  DistanceMatrix dist;
  dist.n = data.n();
  dist.j_count = grid.size();
  dist.values.resize(dist.n * dist.j_count);
  dist.labels = grid.labels;
  for (std::size_t j = 0; j < dist.j_count; ++j) {
    double* col = dist.values.data() + j * dist.n;
    for (std::size_t i = 0; i < dist.n; ++i) {
      double sign = data.t[i] ? 1.0 : -1.0;
      col[i] = sign * std::hypot(data.x1[i] - grid.b1[j], data.x2[i] - grid.b2[j]);
    }
  }
  return dist;
}

namespace {

inline bool on_side(double d, int side) { return (side == 1) == (d >= 0.0); }

}  // namespace

DistFit fit_distance(std::span<const double> dcol, std::span<const double> y, int side, double h,
                     int p, Kernel kernel, int cutoff_index) {
  if (dcol.size() != y.size()) throw ValidationError("distance column and outcomes differ in length");
  std::vector<std::int64_t> idx;
  std::vector<double> w;
  for (std::size_t i = 0; i < dcol.size(); ++i) {
    if (!on_side(dcol[i], side)) continue;
    double kw = kernel_weight_dist(dcol[i], h, kernel);
    if (kw > 0.0) {
      idx.push_back(static_cast<std::int64_t>(i));
      w.push_back(kw);
    }
  }
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd rows(m, p + 1);
  Eigen::VectorXd weights(m), yy(m), basis_row(p + 1);
  for (int r = 0; r < m; ++r) {
    std::size_t i = static_cast<std::size_t>(idx[static_cast<std::size_t>(r)]);
    basis_uni(dcol[i] / h, p, basis_row.data());
    rows.row(r) = basis_row;
    weights(r) = w[static_cast<std::size_t>(r)];
    yy(r) = y[i];
  }
  FitContext ctx{cutoff_index, side, "distance"};
  DistFit fit;
  fit.wls = solve_wls(std::move(rows), std::move(weights), std::move(yy), std::move(idx),
                      static_cast<double>(dcol.size()), ctx);
  fit.h = h;
  fit.side = side;
  fit.cutoff_index = cutoff_index;
  return fit;
}

namespace {

double column_sd(std::span<const double> d) {
  double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(d.size() - 1));
}

/// theta vector for the univariate basis at exponent p+1:
/// (1/n) sum r_p(d/h) (d/h)^(p+1) k_h(d) over the side.
Eigen::VectorXd theta_uni(std::span<const double> dcol, int side, double h, int p,
                          Kernel kernel) {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd r(p + 1);
  for (double d : dcol) {
    if (!on_side(d, side)) continue;
    double kw = kernel_weight_dist(d, h, kernel);
    if (kw <= 0.0) continue;
    double v = d / h;
    basis_uni(v, p, r.data());
    theta.noalias() += (kw * std::pow(v, p + 1)) * r;
  }
  return theta / static_cast<double>(dcol.size());
}

/// One-sided global polynomial of order `order`; returns raw coefficients
/// and the homoskedastic variance of the coefficient at position `pos`.
std::pair<double, double> global_poly_deriv(std::span<const double> dcol,
                                            std::span<const double> y, int side, int order,
                                            int pos, int cutoff_index) {
  std::vector<std::int64_t> idx;
  for (std::size_t i = 0; i < dcol.size(); ++i)
    if (on_side(dcol[i], side)) idx.push_back(static_cast<std::int64_t>(i));
  const int m = static_cast<int>(idx.size());
  if (m < order + 2)
    throw NumericalError("degenerate one-sided data: " + std::to_string(m) +
                         " points on side " + std::to_string(side) + " at cutoff " +
                         std::to_string(cutoff_index + 1));
  Eigen::MatrixXd rows(m, order + 1);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(m), yy(m), basis_row(order + 1);
  for (int r = 0; r < m; ++r) {
    std::size_t i = static_cast<std::size_t>(idx[static_cast<std::size_t>(r)]);
    basis_uni(dcol[i], order, basis_row.data());
    rows.row(r) = basis_row;
    yy(r) = y[i];
  }
  FitContext ctx{cutoff_index, side, "pilot"};
  WlsFit fit = solve_wls(std::move(rows), std::move(w), std::move(yy), std::move(idx),
                         static_cast<double>(m), ctx);
  double dof = std::max(1, m - (order + 1));
  double sigma2 = fit.residuals.squaredNorm() / dof;
  double var_coef = sigma2 * fit.gram_inv(pos, pos) / static_cast<double>(m);
  return {fit.beta(pos), var_coef};
}

struct DistConstants {
  double v_hat = 0.0, bias = 0.0, bias_var = 0.0;
};

DistConstants dist_constants(std::span<const double> dcol, std::span<const double> y, int side,
                             const EstimationConfig& cfg, const std::vector<int>* cluster,
                             double pilot_c, int cutoff_index) {
  DistConstants out;
  GuardOutcome guard = enforce_bwcheck_dist(dcol, side, pilot_c, cfg);
  double c_eff = guard.h1;
  DistFit fit_p = fit_distance(dcol, y, side, c_eff, cfg.p, cfg.kernel, cutoff_index);
  SandwichSpec spec{cfg.vce, cfg.cluster_on};
  Eigen::MatrixXd meat = sigma_meat(fit_p.wls, spec, c_eff * c_eff, cluster);
  out.v_hat = variance_scalar(fit_p.wls, meat, 0);

  // Curvature from a one-sided global polynomial of order p+2: the raw
  // coefficient at position p+1 equals mu^(p+1)/(p+1)!.
  auto [coef, var_coef] =
      global_poly_deriv(dcol, y, side, cfg.p + 2, cfg.p + 1, cutoff_index);
  Eigen::VectorXd theta = theta_uni(dcol, side, c_eff, cfg.p, cfg.kernel);
  double c_k = fit_p.wls.gram_inv.col(0).dot(theta);
  out.bias = coef * c_k;               // (mu^(p+1)/(p+1)!) e1' Gamma^-1 theta
  out.bias_var = var_coef * c_k * c_k;
  return out;
}

}  // namespace

DistBandwidthSet rot_bandwidth_dist(const DistanceMatrix& dist, std::span<const double> y,
                                    const EstimationConfig& cfg, int threads,
                                    const std::vector<int>* cluster) {
  if (dist.n != y.size()) throw ValidationError("distance matrix and outcomes differ in length");
  const std::size_t J = dist.j_count;
  if (J == 0) throw ValidationError("empty cutoff grid");
  const double n = static_cast<double>(dist.n);

  DistBandwidthSet set;
  set.selector = cfg.bwselect;
  set.kink = cfg.kink;
  set.v_const0.resize(J);
  set.v_const1.resize(J);
  set.bias_const0.resize(J);
  set.bias_const1.resize(J);
  set.bias_var0.resize(J);
  set.bias_var1.resize(J);
  set.h_sel0.resize(J);
  set.h_sel1.resize(J);

  double c_k = cfg.pilot_constant.value_or(kernel_pilot_constant(cfg.kernel));
  std::vector<double> pilot_cs(J);
  parallel_for(J, threads, [&](std::size_t j) {
    auto dcol = dist.column(j);
    double pilot = c_k * column_sd(dcol) * std::pow(n, -1.0 / 6.0);
    pilot_cs[j] = pilot;
    DistConstants k0 =
        dist_constants(dcol, y, 0, cfg, cluster, pilot, static_cast<int>(j));
    DistConstants k1 =
        dist_constants(dcol, y, 1, cfg, cluster, pilot, static_cast<int>(j));
    set.v_const0[j] = k0.v_hat;
    set.v_const1[j] = k1.v_hat;
    set.bias_const0[j] = k0.bias;
    set.bias_const1[j] = k1.bias;
    set.bias_var0[j] = k0.bias_var;
    set.bias_var1[j] = k1.bias_var;
  });
  set.pilot_c = std::accumulate(pilot_cs.begin(), pilot_cs.end(), 0.0) / static_cast<double>(J);

  const double s_factor = cfg.reg_factor;
  auto rd_denom = [&](std::size_t j) {
    double diff = set.bias_const1[j] - set.bias_const0[j];
    return diff * diff + s_factor * (set.bias_var0[j] + set.bias_var1[j]);
  };
  auto two_denom = [&](std::size_t j, int t) {
    double b = t == 0 ? set.bias_const0[j] : set.bias_const1[j];
    double v = t == 0 ? set.bias_var0[j] : set.bias_var1[j];
    return b * b + s_factor * v;
  };

  switch (cfg.bwselect) {
    case BwSelect::mserd:
      for (std::size_t j = 0; j < J; ++j)
        set.h_sel0[j] = set.h_sel1[j] =
            mse_bandwidth_formula(set.v_const0[j] + set.v_const1[j], rd_denom(j), n, cfg.p, 0);
      break;
    case BwSelect::msetwo:
      for (std::size_t j = 0; j < J; ++j) {
        set.h_sel0[j] = mse_bandwidth_formula(set.v_const0[j], two_denom(j, 0), n, cfg.p, 0);
        set.h_sel1[j] = mse_bandwidth_formula(set.v_const1[j], two_denom(j, 1), n, cfg.p, 0);
      }
      break;
    case BwSelect::imserd: {
      double v_bar = 0.0, d_bar = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        v_bar += set.v_const0[j] + set.v_const1[j];
        d_bar += rd_denom(j);
      }
      double h = mse_bandwidth_formula(v_bar / static_cast<double>(J),
                                       d_bar / static_cast<double>(J), n, cfg.p, 0);
      for (std::size_t j = 0; j < J; ++j) set.h_sel0[j] = set.h_sel1[j] = h;
      break;
    }
    case BwSelect::imsetwo:
      for (int t = 0; t < 2; ++t) {
        double v_bar = 0.0, d_bar = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
          v_bar += t == 0 ? set.v_const0[j] : set.v_const1[j];
          d_bar += two_denom(j, t);
        }
        double h = mse_bandwidth_formula(v_bar / static_cast<double>(J),
                                         d_bar / static_cast<double>(J), n, cfg.p, 0);
        for (std::size_t j = 0; j < J; ++j) (t == 0 ? set.h_sel0 : set.h_sel1)[j] = h;
      }
      break;
  }

  // Kink shrinkage: n^(1/(2p+4)) rate swapped for n^(1/4) (estimation) and
  // n^(1/3) (inference).
  const double est_shrink =
      cfg.kink ? std::pow(n, 1.0 / (2.0 * cfg.p + 4.0) - 0.25) : 1.0;
  const double inf_shrink =
      cfg.kink ? std::pow(n, 1.0 / (2.0 * cfg.p + 4.0) - 1.0 / 3.0) : 1.0;

  const bool common = cfg.bwselect == BwSelect::mserd || cfg.bwselect == BwSelect::imserd;
  set.at.resize(J);
  parallel_for(J, threads, [&](std::size_t j) {
    auto dcol = dist.column(j);
    DistBandwidthEntry& e = set.at[j];
    double h0 = set.h_sel0[j] * est_shrink;
    double h1 = set.h_sel1[j] * est_shrink;
    GuardOutcome g0 = enforce_bwcheck_dist(dcol, 0, h0, cfg);
    GuardOutcome g1 = enforce_bwcheck_dist(dcol, 1, h1, cfg);
    if (common) {
      e.h0 = e.h1 = std::max(g0.h1, g1.h1);
    } else {
      e.h0 = g0.h1;
      e.h1 = g1.h1;
    }
    e.adjusted_control = e.h0 > h0;
    e.adjusted_treated = e.h1 > h1;
    e.guard_rule = g0.rule != "none" ? g0.rule : (g1.rule != "none" ? g1.rule : "");

    double h0i = set.h_sel0[j] * inf_shrink;
    double h1i = set.h_sel1[j] * inf_shrink;
    GuardOutcome gi0 = enforce_bwcheck_dist(dcol, 0, h0i, cfg);
    GuardOutcome gi1 = enforce_bwcheck_dist(dcol, 1, h1i, cfg);
    if (common) {
      e.h0_inf = e.h1_inf = std::max(gi0.h1, gi1.h1);
    } else {
      e.h0_inf = gi0.h1;
      e.h1_inf = gi1.h1;
    }
    if (!cfg.kink) {
      e.h0_inf = e.h0;
      e.h1_inf = e.h1;
    }
  });
  return set;
}

namespace {

double dist_variance_part(const DistFit& fit, const EstimationConfig& cfg,
                          const std::vector<int>* cluster) {
  SandwichSpec spec{cfg.vce, cfg.cluster_on};
  Eigen::MatrixXd meat = sigma_meat(fit.wls, spec, fit.h * fit.h, cluster);
  return variance_scalar(fit.wls, meat, 0) / (fit.wls.n_total * fit.h * fit.h);
}

}  // namespace

DistanceResult run_distance_analysis(const DistanceMatrix& dist, std::span<const double> y,
                                     const std::optional<CutoffGrid>& grid,
                                     const std::optional<std::vector<int>>& cluster,
                                     const EstimationConfig& cfg,
                                     const std::optional<std::vector<double>>& aate_weights,
                                     int threads) {
  if (dist.n != y.size()) throw ValidationError("distance matrix and outcomes differ in length");
  if (dist.n == 0) throw ValidationError("empty dataset");
  if (dist.j_count == 0) throw ValidationError("empty cutoff grid");
  if (grid && grid->size() != dist.j_count)
    throw ValidationError("grid size does not match the distance matrix");
  if (cfg.deriv_order() != 0)
    throw ValidationError("the distance path estimates the treatment effect level only");
  for (std::size_t j = 0; j < dist.j_count; ++j)
    for (double d : dist.column(j))
      if (!std::isfinite(d))
        throw ValidationError("non-finite distance in column " + std::to_string(j + 1));
  const bool rbc = !cfg.kink;
  const int q = rbc ? cfg.q() : cfg.p;  // same-order inference under kink
  if (rbc && cfg.q() <= cfg.p)
    throw ValidationError("robust bias-corrected inference requires q > p");

  DistanceResult res;
  res.bws = rot_bandwidth_dist(dist, y, cfg, threads, cluster ? &*cluster : nullptr);

  const std::size_t J = dist.j_count;
  const std::vector<int>* cl = cluster ? &*cluster : nullptr;
  DistEstimateSet& est = res.estimates;
  est.fit_p0.resize(J);
  est.fit_p1.resize(J);
  est.fit_q0.resize(J);
  est.fit_q1.resize(J);
  est.tau_p.resize(J);
  est.tau_q.resize(J);
  est.se.resize(J);
  est.se_rbc.resize(J);
  est.n_h0.resize(J);
  est.n_h1.resize(J);

  parallel_for(J, threads, [&](std::size_t j) {
    auto dcol = dist.column(j);
    const DistBandwidthEntry& e = res.bws.at[j];
    est.fit_p0[j] = fit_distance(dcol, y, 0, e.h0, cfg.p, cfg.kernel, static_cast<int>(j));
    est.fit_p1[j] = fit_distance(dcol, y, 1, e.h1, cfg.p, cfg.kernel, static_cast<int>(j));
    est.fit_q0[j] = fit_distance(dcol, y, 0, e.h0_inf, q, cfg.kernel, static_cast<int>(j));
    est.fit_q1[j] = fit_distance(dcol, y, 1, e.h1_inf, q, cfg.kernel, static_cast<int>(j));
    est.tau_p[j] = est.fit_p1[j].wls.beta(0) - est.fit_p0[j].wls.beta(0);
    est.tau_q[j] = est.fit_q1[j].wls.beta(0) - est.fit_q0[j].wls.beta(0);
    est.se[j] = std::sqrt(dist_variance_part(est.fit_p0[j], cfg, cl) +
                          dist_variance_part(est.fit_p1[j], cfg, cl));
    est.se_rbc[j] = std::sqrt(dist_variance_part(est.fit_q0[j], cfg, cl) +
                              dist_variance_part(est.fit_q1[j], cfg, cl));
    est.n_h0[j] = est.fit_p0[j].wls.n_eff;
    est.n_h1[j] = est.fit_p1[j].wls.n_eff;
  });

  InferenceTable& table = res.table;
  std::size_t n_treated = 0;
  for (double d : dist.column(0))
    if (d >= 0.0) ++n_treated;
  table.meta.n = dist.n;
  table.meta.n_treated = n_treated;
  table.meta.n_control = dist.n - n_treated;
  table.meta.bw_label = std::string(to_string(cfg.bwselect)) + "-rot";
  table.meta.kernel_label = std::string(to_string(cfg.kernel)) + "-rad";
  table.meta.vce_label = std::string(to_string(cfg.vce)) + (cfg.cluster_on ? " (cluster)" : "");
  table.meta.masspoint_label = to_string(cfg.masspoint);
  table.meta.kink_label = cfg.kink ? "on" : "off";
  table.meta.p = cfg.p;
  table.meta.q = q;
  table.meta.deriv = cfg.deriv;
  table.meta.level = cfg.level;
  table.meta.show_unique = false;
  table.meta.has_coords = grid.has_value();

  MasspointScan scan = masspoint_scan(dist.column(0), cfg);
  if (scan.warned)
    table.warnings.push_back(
        {"masspoints", "duplicated distances exceed 20% of the sample (share " +
                           std::to_string(scan.duplication_share) + ")"});

  table.rows.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    InferenceRow& r = table.rows[j];
    r.id = static_cast<int>(j) + 1;
    if (grid) {
      r.b1 = grid->b1[j];
      r.b2 = grid->b2[j];
    }
    r.estimate = est.tau_p[j];
    r.rbc_estimate = est.tau_q[j];
    r.se = est.se[j];
    r.se_rbc = est.se_rbc[j];
    r.n_h0 = est.n_h0[j];
    r.n_h1 = est.n_h1[j];
  }
  pointwise_ci(table, cfg);

  std::vector<const WlsFit*> f0, f1;
  std::vector<double> ones(J, 1.0);
  for (std::size_t j = 0; j < J; ++j) {
    f0.push_back(&est.fit_q0[j].wls);
    f1.push_back(&est.fit_q1[j].wls);
  }
  res.cross = cross_covariance(f0, f1, ones, ones, 0, SandwichSpec{cfg.vce, cfg.cluster_on}, cl,
                               static_cast<double>(dist.n));
  uniform_band(res.cross, table, cfg, threads);

  if (aate_weights) {
    EstimateSet shim;
    shim.tau_p = est.tau_p;
    shim.tau_q = est.tau_q;
    table.aate = aate(shim, res.cross, *aate_weights, cfg);
  }
  return res;
}

}  // namespace rd2d
