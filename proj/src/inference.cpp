#include "rd2d/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rd2d/bandwidth.hpp"
#include "rd2d/guards.hpp"
#include "rd2d/parallel.hpp"
#include "rd2d/rng.hpp"

namespace rd2d {

namespace {

constexpr std::uint64_t kBandSalt = 0xB4ED5ULL;

double group_variance_part(const LocalFit& fit, const EstimationConfig& cfg,
                           const std::vector<int>* cluster, int pos) {
  SandwichSpec spec{cfg.vce, cfg.cluster_on};
  Eigen::MatrixXd meat = sigma_meat(fit.wls, spec, fit.h1 * fit.h2, cluster);
  double v = variance_scalar(fit.wls, meat, pos);
  double scale = fit.deriv_scale(cfg.deriv.first, cfg.deriv.second);
  return scale * scale * v / (fit.wls.n_total * fit.h1 * fit.h2);
}

}  // namespace

EstimateSet estimate_tau(const Dataset& data, const CutoffGrid& grid, const BandwidthSet& bws,
                         const EstimationConfig& cfg, int threads) {
  const std::size_t J = grid.size();
  if (bws.at.size() != J) throw ValidationError("bandwidth set does not match the grid");
  const int q = cfg.q();
  MultiIndexSet mis(cfg.p);
  const int pos = mis.position(cfg.deriv.first, cfg.deriv.second);
  if (pos < 0) throw ValidationError("derivative order exceeds p");
  const std::vector<int>* cluster = data.cluster ? &*data.cluster : nullptr;

  EstimateSet est;
  est.fit_p0.resize(J);
  est.fit_p1.resize(J);
  est.fit_q0.resize(J);
  est.fit_q1.resize(J);
  est.tau_p.resize(J);
  est.tau_q.resize(J);
  est.se.resize(J);
  est.se_rbc.resize(J);
  est.scale_q0.resize(J);
  est.scale_q1.resize(J);
  est.n_h0.resize(J);
  est.n_h1.resize(J);

  parallel_for(J, threads, [&](std::size_t j) {
    const BandwidthEntry& e = bws.at[j];
    // Guards are idempotent: bandwidths from select_bandwidths pass through
    // unchanged, manually supplied ones get the same floor applied.
    GuardOutcome g0 = enforce_bwcheck(data, grid.b1[j], grid.b2[j], 0, e.h01, e.h02, cfg);
    GuardOutcome g1 = enforce_bwcheck(data, grid.b1[j], grid.b2[j], 1, e.h11, e.h12, cfg);

    est.fit_p0[j] = fit_local(data, grid.b1[j], grid.b2[j], 0, g0.h1, g0.h2, cfg.p, cfg.kernel,
                              cfg.kernel_type, static_cast<int>(j));
    est.fit_p1[j] = fit_local(data, grid.b1[j], grid.b2[j], 1, g1.h1, g1.h2, cfg.p, cfg.kernel,
                              cfg.kernel_type, static_cast<int>(j));
    est.fit_q0[j] = fit_local(data, grid.b1[j], grid.b2[j], 0, g0.h1, g0.h2, q, cfg.kernel,
                              cfg.kernel_type, static_cast<int>(j));
    est.fit_q1[j] = fit_local(data, grid.b1[j], grid.b2[j], 1, g1.h1, g1.h2, q, cfg.kernel,
                              cfg.kernel_type, static_cast<int>(j));

    auto estimand = [&](const LocalFit& fit) {
      return fit.deriv_scale(cfg.deriv.first, cfg.deriv.second) * fit.wls.beta(pos);
    };
    est.tau_p[j] = estimand(est.fit_p1[j]) - estimand(est.fit_p0[j]);
    est.tau_q[j] = estimand(est.fit_q1[j]) - estimand(est.fit_q0[j]);
    est.se[j] = std::sqrt(group_variance_part(est.fit_p0[j], cfg, cluster, pos) +
                          group_variance_part(est.fit_p1[j], cfg, cluster, pos));
    est.se_rbc[j] = std::sqrt(group_variance_part(est.fit_q0[j], cfg, cluster, pos) +
                              group_variance_part(est.fit_q1[j], cfg, cluster, pos));
    est.scale_q0[j] = est.fit_q0[j].deriv_scale(cfg.deriv.first, cfg.deriv.second);
    est.scale_q1[j] = est.fit_q1[j].deriv_scale(cfg.deriv.first, cfg.deriv.second);
    auto [n0, n1] = effective_counts(est.fit_p0[j], est.fit_p1[j]);
    est.n_h0[j] = n0;
    est.n_h1[j] = n1;
  });
  return est;
}

void pointwise_ci(InferenceTable& table, const EstimationConfig& cfg) {
  const double z_alpha = normal_icdf(1.0 - cfg.alpha() / 2.0);
  for (auto& row : table.rows) {
    if (row.se_rbc > 0.0) {
      row.z = row.rbc_estimate / row.se_rbc;
      row.p_value = normal_pvalue_two_sided(row.z);
    } else {
      row.z = row.rbc_estimate == 0.0 ? 0.0
                                      : std::copysign(std::numeric_limits<double>::infinity(),
                                                      row.rbc_estimate);
      row.p_value = row.rbc_estimate == 0.0 ? 1.0 : 0.0;
      table.warnings.push_back({"degenerate_ci", "zero-width interval at cutoff " +
                                                     std::to_string(row.id) +
                                                     " (zero variance estimate)"});
    }
    row.ci_lo = row.rbc_estimate - z_alpha * row.se_rbc;
    row.ci_hi = row.rbc_estimate + z_alpha * row.se_rbc;
  }
}

BandQuantile uniform_band(const CrossCovariance& cross, InferenceTable& table,
                          const EstimationConfig& cfg, int threads) {
  const int J = static_cast<int>(cross.corr_sqrt.rows());
  if (J != static_cast<int>(table.rows.size()))
    throw ValidationError("covariance dimension does not match the table");
  const int draws = cfg.band_draws;
  BandQuantile bq;
  bq.alpha = cfg.alpha();
  bq.draws = draws;
  bq.seed = cfg.seed;

  CounterRng rng(CounterRng::derive(cfg.seed, kBandSalt));
  std::vector<double> sup(static_cast<std::size_t>(draws));
  parallel_for(static_cast<std::size_t>(draws), threads, [&](std::size_t d) {
    Eigen::VectorXd z(J);
    for (int j = 0; j < J; ++j)
      z(j) = rng.normal(static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(j));
    sup[d] = (cross.corr_sqrt * z).cwiseAbs().maxCoeff();
  });
  std::sort(sup.begin(), sup.end());
  auto rank = static_cast<std::size_t>(
      std::ceil((1.0 - bq.alpha) * static_cast<double>(draws)));
  rank = std::min(std::max<std::size_t>(rank, 1), static_cast<std::size_t>(draws));
  double q_sim = sup[rank - 1];
  const double z_alpha = normal_icdf(1.0 - bq.alpha / 2.0);
  bq.floored = q_sim < z_alpha;
  bq.q_alpha = std::max(q_sim, z_alpha);

  for (auto& row : table.rows) {
    row.cb_lo = row.rbc_estimate - bq.q_alpha * row.se_rbc;
    row.cb_hi = row.rbc_estimate + bq.q_alpha * row.se_rbc;
  }
  table.band = bq;
  return bq;
}

AateRow aate(const EstimateSet& est, const CrossCovariance& cross,
             const std::vector<double>& weights, const EstimationConfig& cfg) {
  const std::size_t J = est.tau_p.size();
  if (weights.size() != J) throw ValidationError("AATE weights length does not match the grid");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw ValidationError("AATE weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw ValidationError("AATE weights sum to zero");

  AateRow row;
  Eigen::VectorXd wn(static_cast<int>(J));
  for (std::size_t j = 0; j < J; ++j) {
    wn(static_cast<int>(j)) = weights[j] / total;
    row.estimate += weights[j] / total * est.tau_p[j];
    row.rbc_estimate += weights[j] / total * est.tau_q[j];
  }
  row.se = std::sqrt(std::max(0.0, wn.dot(cross.cov * wn)));
  if (row.se > 0.0) {
    row.z = row.rbc_estimate / row.se;
    row.p_value = normal_pvalue_two_sided(row.z);
  } else {
    row.z = 0.0;
    row.p_value = 1.0;
  }
  const double z_alpha = normal_icdf(1.0 - cfg.alpha() / 2.0);
  row.ci_lo = row.rbc_estimate - z_alpha * row.se;
  row.ci_hi = row.rbc_estimate + z_alpha * row.se;
  return row;
}

LocationResult run_location_analysis(const Dataset& data, const CutoffGrid& grid,
                                     const EstimationConfig& cfg,
                                     const std::optional<std::vector<double>>& aate_weights,
                                     int threads) {
  LocationResult res;
  res.validation = validate_inputs(data, grid, cfg);
  require_valid(res.validation);
  if (cfg.q() <= cfg.p)
    throw ValidationError("robust bias-corrected inference requires q > p on the location path");

  InferenceTable& table = res.table;
  MasspointScan scan = masspoint_scan(data, cfg);
  if (scan.warned)
    table.warnings.push_back(
        {"masspoints", "duplicated score rows exceed 20% of the sample (share " +
                           std::to_string(scan.duplication_share) + ")"});
  if (res.validation.duplicate_grid_points > 0)
    table.warnings.push_back(
        {"duplicate_cutoffs", std::to_string(res.validation.duplicate_grid_points) +
                                  " duplicated cutoff point(s) in the grid"});

  res.bws = select_bandwidths(data, grid, cfg, threads);
  res.estimates = estimate_tau(data, grid, res.bws, cfg, threads);

  table.meta.n = data.n();
  table.meta.n_control = res.validation.n_control;
  table.meta.n_treated = res.validation.n_treated;
  table.meta.unique_control = res.validation.unique_control;
  table.meta.unique_treated = res.validation.unique_treated;
  table.meta.bw_label = std::string(to_string(cfg.bwselect)) + "-dpi" + (cfg.stdvar ? "-std" : "");
  table.meta.kernel_label =
      std::string(to_string(cfg.kernel)) + "-" + to_string(cfg.kernel_type);
  table.meta.vce_label = std::string(to_string(cfg.vce)) + (cfg.cluster_on ? " (cluster)" : "");
  table.meta.masspoint_label = to_string(cfg.masspoint);
  table.meta.p = cfg.p;
  table.meta.q = cfg.q();
  table.meta.deriv = cfg.deriv;
  table.meta.level = cfg.level;

  const std::size_t J = grid.size();
  table.rows.resize(J);
  for (std::size_t j = 0; j < J; ++j) {
    InferenceRow& r = table.rows[j];
    r.id = static_cast<int>(j) + 1;
    r.b1 = grid.b1[j];
    r.b2 = grid.b2[j];
    r.estimate = res.estimates.tau_p[j];
    r.rbc_estimate = res.estimates.tau_q[j];
    r.se = res.estimates.se[j];
    r.se_rbc = res.estimates.se_rbc[j];
    r.n_h0 = res.estimates.n_h0[j];
    r.n_h1 = res.estimates.n_h1[j];
  }
  pointwise_ci(table, cfg);

  std::vector<const WlsFit*> f0, f1;
  for (std::size_t j = 0; j < J; ++j) {
    f0.push_back(&res.estimates.fit_q0[j].wls);
    f1.push_back(&res.estimates.fit_q1[j].wls);
  }
  MultiIndexSet mis(cfg.p);
  res.cross = cross_covariance(f0, f1, res.estimates.scale_q0, res.estimates.scale_q1,
                               mis.position(cfg.deriv.first, cfg.deriv.second),
                               SandwichSpec{cfg.vce, cfg.cluster_on},
                               data.cluster ? &*data.cluster : nullptr,
                               static_cast<double>(data.n()));
  uniform_band(res.cross, table, cfg, threads);
  if (aate_weights) table.aate = aate(res.estimates, res.cross, *aate_weights, cfg);
  return res;
}

}  // namespace rd2d
