#include "rd2d/bandwidth.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rd2d/guards.hpp"
#include "rd2d/kernel.hpp"
#include "rd2d/local_fit.hpp"
#include "rd2d/parallel.hpp"
#include "rd2d/variance.hpp"

namespace rd2d {

namespace {

double sample_sd(const std::vector<double>& v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double kernel_pilot_constant(Kernel k) {
  switch (k) {
    case Kernel::triangular: return 1.0;
    case Kernel::epanechnikov: return 0.9085602964160698;  // (3/4)^(1/3)
    case Kernel::uniform: return 0.7211247851537042;       // (3/8)^(1/3)
  }
  return 1.0;
}

double pilot_step1(const Dataset& data, const EstimationConfig& cfg) {
  if (data.n() < 4) throw ValidationError("pilot bandwidth requires n >= 4");
  double c_k = cfg.pilot_constant.value_or(kernel_pilot_constant(cfg.kernel));
  double sigma_bar = 1.0;
  if (!cfg.stdvar) {
    double s1 = sample_sd(data.x1), s2 = sample_sd(data.x2);
    if (!(s1 > 0.0) || !(s2 > 0.0))
      throw NumericalError("zero variance in a score coordinate");
    sigma_bar = std::sqrt(s1 * s2);
  }
  return c_k * sigma_bar * std::pow(static_cast<double>(data.n()), -1.0 / 6.0);
}

double mse_bandwidth_formula(double v, double b2_regularized, double n, int p, int deriv_order) {
  if (!(b2_regularized > 0.0))
    throw NumericalError(
        "zero regularized bandwidth denominator; set a regularization factor s > 0");
  if (!(v > 0.0)) throw NumericalError("non-positive variance constant in bandwidth formula");
  double c_nu = (2.0 + 2.0 * deriv_order) / (2.0 * p + 2.0 - 2.0 * deriv_order);
  return std::pow(c_nu * v / (b2_regularized * n), 1.0 / (2.0 * p + 4.0));
}

double pilot_bandwidth_formula(double v, double b2, double n, int p, int q) {
  if (!(b2 > 0.0) || !(v > 0.0)) throw NumericalError("degenerate pilot bandwidth constants");
  return std::pow((2.0 * p + 4.0) * v / (2.0 * (q - p) * b2 * n), 1.0 / (2.0 * q + 4.0));
}

namespace {

struct GroupCutoffPilot {
  double v_const = 0.0;   // V_L: variance constant of the bias linear combination
  double b_const = 0.0;   // B_L: its leading bias constant
};

// Selector scale is not applied during selection: factorials cancel in the
// V/B^2 ratio and only the selector position matters.
int deriv_position(const EstimationConfig& cfg) {
  MultiIndexSet mis(cfg.p);
  int pos = mis.position(cfg.deriv.first, cfg.deriv.second);
  if (pos < 0) throw ValidationError("derivative order exceeds p");
  return pos;
}

// Gram/theta coefficients a_k = e_s' Gamma_p^-1 theta_p(k) / k! at bandwidth
// c for every |k| = p+1, plus the guarded pilot bandwidth actually used.
struct PilotMatrices {
  LocalFit fit_p;                 // order-p fit at guarded c
  std::vector<double> a;          // one per |k| = p+1 multi-index
  std::vector<MultiIndex> kset;   // the |k| = p+1 multi-indices (block order)
  double c_eff = 0.0;
};

PilotMatrices pilot_matrices(const Dataset& data, const CutoffGrid& grid, std::size_t j,
                             int group, const EstimationConfig& cfg, double c_hat) {
  PilotMatrices pm;
  GuardOutcome guard = enforce_bwcheck(data, grid.b1[j], grid.b2[j], group, c_hat, c_hat, cfg);
  pm.c_eff = std::max(guard.h1, guard.h2);
  pm.fit_p = fit_local(data, grid.b1[j], grid.b2[j], group, pm.c_eff, pm.c_eff, cfg.p,
                       cfg.kernel, cfg.kernel_type, static_cast<int>(j), "pilot");
  pm.kset = MultiIndexSet::exact_order(cfg.p + 1);
  int pos = deriv_position(cfg);
  Eigen::VectorXd u = pm.fit_p.wls.gram_inv.col(pos);
  for (const auto& k : pm.kset) {
    Eigen::VectorXd theta = theta_vector(data, grid.b1[j], grid.b2[j], group, pm.c_eff, pm.c_eff,
                                         cfg.p, cfg.kernel, cfg.kernel_type, k);
    pm.a.push_back(u.dot(theta) / multi_factorial(k));
  }
  return pm;
}

// Unweighted polynomial reference fit of order `order` on the group, used
// for the pilot bias constants. k_neighbors is a well-posedness floor: the
// group must offer at least that many points near the cutoff. Derivatives of
// order q+1 estimated on small neighborhoods are dominated by noise (the
// variance scales with the neighborhood radius to the power -2(q+1)), which
// collapses the pilot bandwidth, so the reference fit uses every group
// point.
Eigen::VectorXd knn_poly_fit(const Dataset& data, double x1, double x2, int group, int order,
                             int k_neighbors, std::size_t cutoff_index) {
  std::vector<std::int64_t> idx;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.t[i] == static_cast<std::uint8_t>(group)) idx.push_back(static_cast<std::int64_t>(i));
  MultiIndexSet mis(order);
  if (static_cast<int>(idx.size()) < std::max(k_neighbors, mis.dim()))
    throw NumericalError("insufficient neighbors for the order-" + std::to_string(order) +
                         " pilot fit at cutoff " + std::to_string(cutoff_index + 1) + ", group " +
                         std::to_string(group));


  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd rows(m, mis.dim());
  Eigen::VectorXd w = Eigen::VectorXd::Ones(m), y(m), basis_row(mis.dim());
  for (int r = 0; r < m; ++r) {
    std::size_t i = static_cast<std::size_t>(idx[static_cast<std::size_t>(r)]);
    basis_biv(data.x1[i] - x1, data.x2[i] - x2, mis, basis_row.data());
    rows.row(r) = basis_row;
    y(r) = data.y[i];
  }
  FitContext ctx{static_cast<int>(cutoff_index), group, "pilot"};
  return solve_wls(std::move(rows), std::move(w), std::move(y), std::move(idx),
                   static_cast<double>(m), ctx)
      .beta;
}

GroupCutoffPilot pilot_parts(const Dataset& data, const CutoffGrid& grid, std::size_t j,
                             int group, const EstimationConfig& cfg,
                             const PilotMatrices& pm) {
  const int q = cfg.q();
  GroupCutoffPilot out;

  // Variance constant from an order-q fit at c_hat.
  LocalFit fit_q = fit_local(data, grid.b1[j], grid.b2[j], group, pm.c_eff, pm.c_eff, q,
                             cfg.kernel, cfg.kernel_type, static_cast<int>(j), "pilot");
  SandwichSpec spec{cfg.vce, cfg.cluster_on};
  Eigen::MatrixXd meat =
      sigma_meat(fit_q.wls, spec, pm.c_eff * pm.c_eff,
                 data.cluster ? &*data.cluster : nullptr);
  Eigen::MatrixXd s_q = fit_q.wls.gram_inv * meat * fit_q.wls.gram_inv;

  MultiIndexSet mis_q(q);
  std::vector<int> pos_k;
  for (const auto& k : pm.kset) pos_k.push_back(mis_q.position(k.k1, k.k2));

  for (std::size_t ka = 0; ka < pm.kset.size(); ++ka)
    for (std::size_t kb = 0; kb < pm.kset.size(); ++kb)
      out.v_const += pm.a[ka] * pm.a[kb] * multi_factorial(pm.kset[ka]) *
                     multi_factorial(pm.kset[kb]) *
                     s_q(pos_k[ka], pos_k[kb]);

  // Bias constant from a global order-(q+1) polynomial on nearest neighbors.
  MultiIndexSet mis_q1(q + 1);
  int k_neighbors = std::max(cfg.bwcheck_loc(), 5 * mis_q1.dim());
  Eigen::VectorXd coef =
      knn_poly_fit(data, grid.b1[j], grid.b2[j], group, q + 1, k_neighbors, j);
  auto mset = MultiIndexSet::exact_order(q + 1);
  // Leading bias direction of the scaled order-q coefficients:
  // sum_m (mu^(m)/m!) Gamma_q^-1 theta_q(m); the raw-offset coefficient of
  // the monomial m is exactly mu^(m)/m!.
  Eigen::VectorXd bias_dir = Eigen::VectorXd::Zero(mis_q.dim());
  for (const auto& m : mset) {
    Eigen::VectorXd theta_m = theta_vector(data, grid.b1[j], grid.b2[j], group, pm.c_eff,
                                           pm.c_eff, q, cfg.kernel, cfg.kernel_type, m);
    bias_dir.noalias() += coef(mis_q1.position(m.k1, m.k2)) * (fit_q.wls.gram_inv * theta_m);
  }
  for (std::size_t ka = 0; ka < pm.kset.size(); ++ka)
    out.b_const += pm.a[ka] * multi_factorial(pm.kset[ka]) * bias_dir(pos_k[ka]);
  return out;
}

}  // namespace

Eigen::VectorXd pilot_reference_fit(const Dataset& data, double x1, double x2, int group,
                                    int order, int min_points) {
  return knn_poly_fit(data, x1, x2, group, order, min_points, 0);
}

std::pair<double, double> pilot_step2(const Dataset& data, const CutoffGrid& grid,
                                      const EstimationConfig& cfg, double c_hat) {
  const int q = cfg.q();
  if (q <= cfg.p) throw ValidationError("pilot_step2 requires q > p");
  double n = static_cast<double>(data.n());
  std::array<double, 2> b_hat{0.0, 0.0};
  for (int t = 0; t < 2; ++t) {
    double v_sum = 0.0, b2_sum = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      PilotMatrices pm = pilot_matrices(data, grid, j, t, cfg, c_hat);
      GroupCutoffPilot parts = pilot_parts(data, grid, j, t, cfg, pm);
      v_sum += parts.v_const;
      b2_sum += parts.b_const * parts.b_const;
    }
    double v_bar = v_sum / static_cast<double>(grid.size());
    double b2_bar = b2_sum / static_cast<double>(grid.size());
    double fallback = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
      if (data.t[i] != static_cast<std::uint8_t>(t)) continue;
      for (std::size_t j = 0; j < grid.size(); ++j)
        fallback = std::max(fallback, std::hypot(data.x1[i] - grid.b1[j], data.x2[i] - grid.b2[j]));
    }
    if (v_bar > 0.0 && b2_bar > 0.0 && std::isfinite(v_bar) && std::isfinite(b2_bar)) {
      b_hat[static_cast<std::size_t>(t)] =
          std::min(pilot_bandwidth_formula(v_bar, b2_bar, n, cfg.p, q), fallback);
    } else {
      b_hat[static_cast<std::size_t>(t)] = fallback;  // near-zero curvature: go global
    }
  }
  return {b_hat[0], b_hat[1]};
}

BiasVarianceConstants bias_constant(const Dataset& data, const CutoffGrid& grid, std::size_t j,
                                    int group, const EstimationConfig& cfg, double c_hat,
                                    double b_hat) {
  const int q = cfg.q();
  BiasVarianceConstants out;
  PilotMatrices pm = pilot_matrices(data, grid, j, group, cfg, c_hat);
  SandwichSpec spec{cfg.vce, cfg.cluster_on};
  const std::vector<int>* cluster = data.cluster ? &*data.cluster : nullptr;

  // Variance constant: order-p residuals and matrices at c_hat.
  Eigen::MatrixXd meat_p = sigma_meat(pm.fit_p.wls, spec, pm.c_eff * pm.c_eff, cluster);
  out.v_hat = variance_scalar(pm.fit_p.wls, meat_p, deriv_position(cfg));

  // Bias constant: order-(p+1) derivatives read off the order-q fit at b_hat.
  GuardOutcome guard = enforce_bwcheck(data, grid.b1[j], grid.b2[j], group, b_hat, b_hat, cfg);
  double b_eff = std::max(guard.h1, guard.h2);
  LocalFit fit_q = fit_local(data, grid.b1[j], grid.b2[j], group, b_eff, b_eff, q, cfg.kernel,
                             cfg.kernel_type, static_cast<int>(j), "pilot");
  Eigen::MatrixXd meat_q = sigma_meat(fit_q.wls, spec, b_eff * b_eff, cluster);
  Eigen::MatrixXd s_q = fit_q.wls.gram_inv * meat_q * fit_q.wls.gram_inv;
  MultiIndexSet mis_q(q);

  double scale = std::pow(b_eff, cfg.p + 1);
  for (std::size_t ka = 0; ka < pm.kset.size(); ++ka) {
    const auto& k = pm.kset[ka];
    int pos = mis_q.position(k.k1, k.k2);
    double kfact = multi_factorial(k);
    double mu_k = kfact * fit_q.wls.beta(pos) / scale;
    out.bias += pm.a[ka] * mu_k;
    double var_mu = kfact * kfact * std::max(s_q(pos, pos), 0.0) /
                    (static_cast<double>(data.n()) * std::pow(b_eff, 2.0 * cfg.p + 4.0));
    out.bias_var += pm.a[ka] * pm.a[ka] * var_mu;
  }
  return out;
}

namespace {

struct SelectionSpace {
  Dataset data;
  CutoffGrid grid;
  double sigma1 = 1.0, sigma2 = 1.0;
};

SelectionSpace make_selection_space(const Dataset& data, const CutoffGrid& grid,
                                    const EstimationConfig& cfg) {
  SelectionSpace s;
  s.data = data;
  s.grid = grid;
  if (cfg.stdvar) {
    s.sigma1 = sample_sd(data.x1);
    s.sigma2 = sample_sd(data.x2);
    if (!(s.sigma1 > 0.0) || !(s.sigma2 > 0.0))
      throw NumericalError("zero variance in a score coordinate");
    for (auto& v : s.data.x1) v /= s.sigma1;
    for (auto& v : s.data.x2) v /= s.sigma2;
    for (auto& v : s.grid.b1) v /= s.sigma1;
    for (auto& v : s.grid.b2) v /= s.sigma2;
  }
  return s;
}

}  // namespace

BandwidthSet select_bandwidths(const Dataset& data, const CutoffGrid& grid,
                               const EstimationConfig& cfg, int threads) {
  const std::size_t J = grid.size();
  if (J == 0) throw ValidationError("empty cutoff grid");
  SelectionSpace sel = make_selection_space(data, grid, cfg);
  const double n = static_cast<double>(data.n());

  BandwidthSet set;
  set.selector = cfg.bwselect;
  set.standardized = cfg.stdvar;
  set.sigma_x1 = sel.sigma1;
  set.sigma_x2 = sel.sigma2;
  set.pilot.c_hat = pilot_step1(data, cfg);
  auto [b0, b1] = pilot_step2(sel.data, sel.grid, cfg, set.pilot.c_hat);
  set.pilot.b_hat0 = b0;
  set.pilot.b_hat1 = b1;

  set.v_const0.resize(J);
  set.v_const1.resize(J);
  set.bias_const0.resize(J);
  set.bias_const1.resize(J);
  set.bias_var0.resize(J);
  set.bias_var1.resize(J);
  parallel_for(J, threads, [&](std::size_t j) {
    BiasVarianceConstants c0 = bias_constant(sel.data, sel.grid, j, 0, cfg, set.pilot.c_hat, b0);
    BiasVarianceConstants c1 = bias_constant(sel.data, sel.grid, j, 1, cfg, set.pilot.c_hat, b1);
    set.v_const0[j] = c0.v_hat;
    set.v_const1[j] = c1.v_hat;
    set.bias_const0[j] = c0.bias;
    set.bias_const1[j] = c1.bias;
    set.bias_var0[j] = c0.bias_var;
    set.bias_var1[j] = c1.bias_var;
  });

  const double s_factor = cfg.reg_factor;
  const int nu = cfg.deriv_order();
  set.h_sel0.resize(J);
  set.h_sel1.resize(J);
  switch (cfg.bwselect) {
    case BwSelect::mserd:
      for (std::size_t j = 0; j < J; ++j) {
        double diff = set.bias_const1[j] - set.bias_const0[j];
        double denom = diff * diff + s_factor * (set.bias_var0[j] + set.bias_var1[j]);
        double h = mse_bandwidth_formula(set.v_const0[j] + set.v_const1[j], denom, n, cfg.p, nu);
        set.h_sel0[j] = set.h_sel1[j] = h;
      }
      break;
    case BwSelect::msetwo:
      for (std::size_t j = 0; j < J; ++j) {
        for (int t = 0; t < 2; ++t) {
          const auto& bc = t == 0 ? set.bias_const0 : set.bias_const1;
          const auto& bv = t == 0 ? set.bias_var0 : set.bias_var1;
          const auto& vc = t == 0 ? set.v_const0 : set.v_const1;
          double denom = bc[j] * bc[j] + s_factor * bv[j];
          double h = mse_bandwidth_formula(vc[j], denom, n, cfg.p, nu);
          (t == 0 ? set.h_sel0 : set.h_sel1)[j] = h;
        }
      }
      break;
    case BwSelect::imserd: {
      double v_bar = 0.0, d_bar = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        double diff = set.bias_const1[j] - set.bias_const0[j];
        v_bar += set.v_const0[j] + set.v_const1[j];
        d_bar += diff * diff + s_factor * (set.bias_var0[j] + set.bias_var1[j]);
      }
      double h = mse_bandwidth_formula(v_bar / static_cast<double>(J),
                                       d_bar / static_cast<double>(J), n, cfg.p, nu);
      for (std::size_t j = 0; j < J; ++j) set.h_sel0[j] = set.h_sel1[j] = h;
      break;
    }
    case BwSelect::imsetwo:
      for (int t = 0; t < 2; ++t) {
        const auto& bc = t == 0 ? set.bias_const0 : set.bias_const1;
        const auto& bv = t == 0 ? set.bias_var0 : set.bias_var1;
        const auto& vc = t == 0 ? set.v_const0 : set.v_const1;
        double v_bar = 0.0, d_bar = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
          v_bar += vc[j];
          d_bar += bc[j] * bc[j] + s_factor * bv[j];
        }
        double h = mse_bandwidth_formula(v_bar / static_cast<double>(J),
                                         d_bar / static_cast<double>(J), n, cfg.p, nu);
        for (std::size_t j = 0; j < J; ++j) (t == 0 ? set.h_sel0 : set.h_sel1)[j] = h;
      }
      break;
  }

  // Undo standardization and enforce the sample-size floor in original space.
  set.at.resize(J);
  const bool common = cfg.bwselect == BwSelect::mserd || cfg.bwselect == BwSelect::imserd;
  parallel_for(J, threads, [&](std::size_t j) {
    BandwidthEntry& e = set.at[j];
    double h0_1 = set.h_sel0[j] * sel.sigma1, h0_2 = set.h_sel0[j] * sel.sigma2;
    double h1_1 = set.h_sel1[j] * sel.sigma1, h1_2 = set.h_sel1[j] * sel.sigma2;
    GuardOutcome g0 = enforce_bwcheck(data, grid.b1[j], grid.b2[j], 0, h0_1, h0_2, cfg);
    GuardOutcome g1 = enforce_bwcheck(data, grid.b1[j], grid.b2[j], 1, h1_1, h1_2, cfg);
    if (common) {
      e.h01 = e.h11 = std::max(g0.h1, g1.h1);
      e.h02 = e.h12 = std::max(g0.h2, g1.h2);
    } else {
      e.h01 = g0.h1;
      e.h02 = g0.h2;
      e.h11 = g1.h1;
      e.h12 = g1.h2;
    }
    e.adjusted_control = e.h01 > h0_1 || e.h02 > h0_2;
    e.adjusted_treated = e.h11 > h1_1 || e.h12 > h1_2;
    if (g0.rule != "none")
      e.guard_rule = g0.rule;
    else if (g1.rule != "none")
      e.guard_rule = g1.rule;
    else
      e.guard_rule = e.adjusted_control || e.adjusted_treated ? "bwcheck_shared" : "";
  });
  return set;
}

}  // namespace rd2d
