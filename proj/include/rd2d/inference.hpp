#pragma once

#include <optional>
#include <vector>

#include "rd2d/local_fit.hpp"
#include "rd2d/types.hpp"
#include "rd2d/variance.hpp"

namespace rd2d {

/// Per-cutoff estimates plus the fits needed for cross-cutoff covariance.
struct EstimateSet {
  std::vector<LocalFit> fit_p0, fit_p1, fit_q0, fit_q1;
  std::vector<double> tau_p, tau_q;  // point estimate and rbc estimate
  std::vector<double> se, se_rbc;
  std::vector<double> scale_q0, scale_q1;  // derivative scaling per group
  std::vector<int> n_h0, n_h1;
};

/// Order-p and order-q fits at every cutoff using the (I)MSE-optimal
/// bandwidths selected for the order-p estimator; both orders share the same
/// bandwidths. Derivative estimands apply the factorial/bandwidth scaling to
/// the selected coefficient.
EstimateSet estimate_tau(const Dataset& data, const CutoffGrid& grid, const BandwidthSet& bws,
                         const EstimationConfig& cfg, int threads = 1);

/// Wald inference: z = tau_q / se_rbc, two-sided normal p-value, and the
/// robust bias-corrected interval centered at the q-th order estimate (not
/// at the point estimate).
void pointwise_ci(InferenceTable& table, const EstimationConfig& cfg);

/// Simulated sup-|Gaussian| critical value over the cutoff grid, clipped
/// from below at the pointwise normal quantile so bands always contain the
/// pointwise intervals. Fills the cb columns of the table.
BandQuantile uniform_band(const CrossCovariance& cross, InferenceTable& table,
                          const EstimationConfig& cfg, int threads = 1);

/// Weighted aggregation of the treatment effect curve over the grid with its
/// rbc interval from the full cross-cutoff covariance.
AateRow aate(const EstimateSet& est, const CrossCovariance& cross,
             const std::vector<double>& weights, const EstimationConfig& cfg);

struct LocationResult {
  ValidationReport validation;
  BandwidthSet bws;
  EstimateSet estimates;
  CrossCovariance cross;
  InferenceTable table;
};

/// End-to-end location path: validation, masspoint scan, bandwidth
/// selection, estimation, pointwise and uniform inference, optional AATE.
LocationResult run_location_analysis(const Dataset& data, const CutoffGrid& grid,
                                     const EstimationConfig& cfg,
                                     const std::optional<std::vector<double>>& aate_weights = {},
                                     int threads = 0);

}  // namespace rd2d
