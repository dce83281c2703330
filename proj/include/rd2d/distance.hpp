#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rd2d/types.hpp"
#include "rd2d/variance.hpp"
#include "rd2d/wls.hpp"

namespace rd2d {

/// Signed distances to every cutoff, column-major n x J. The sign carries the
/// treatment indicator: D_i(b_j) = (2 T_i - 1) dist(X_i, b_j), and the side
/// partition puts d >= 0 (including exact zeros) with treatment.
struct DistanceMatrix {
  std::size_t n = 0;
  std::size_t j_count = 0;
  std::vector<double> values;  // column-major
  std::vector<std::string> labels;

  double at(std::size_t i, std::size_t j) const { return values[j * n + i]; }
  std::span<const double> column(std::size_t j) const {
    return {values.data() + j * n, n};
  }
};

/// Euclidean signed distances from the scores to every grid point.
DistanceMatrix build_distances(const Dataset& data, const CutoffGrid& grid);

/// One-sided univariate local polynomial fit on a distance column. side 1
/// fits d >= 0, side 0 fits d < 0; weights are k(d/h)/h^2.
struct DistFit {
  WlsFit wls;
  double h = 0.0;
  int side = 0;
  int cutoff_index = -1;
};

DistFit fit_distance(std::span<const double> dcol, std::span<const double> y, int side, double h,
                     int p, Kernel kernel, int cutoff_index = -1);

/// Per-cutoff distance bandwidths. Under kink adjustment the selected
/// bandwidth is shrunk by n^(1/(2p+4)-1/4) for estimation and
/// n^(1/(2p+4)-1/3) for inference, and inference uses the same order as
/// estimation (q = p).
struct DistBandwidthEntry {
  double h0 = 0.0, h1 = 0.0;          // estimation bandwidths per group
  double h0_inf = 0.0, h1_inf = 0.0;  // inference bandwidths (= h when kink off)
  bool adjusted_control = false, adjusted_treated = false;
  std::string guard_rule;
};

struct DistBandwidthSet {
  std::vector<DistBandwidthEntry> at;
  BwSelect selector = BwSelect::mserd;
  bool kink = false;
  double pilot_c = 0.0;  // normal-reference pilot bandwidth
  // selection diagnostics per cutoff
  std::vector<double> v_const0, v_const1, bias_const0, bias_const1, bias_var0, bias_var1;
  std::vector<double> h_sel0, h_sel1;  // pre-guard, pre-kink-shrink
};

/// Rule-of-thumb distance bandwidths: MSE-optimal plug-in treating the signed
/// distance as a scalar score with cutoff zero. Variance constants from a
/// pilot fit at a normal-reference bandwidth, curvature from one-sided global
/// polynomials of order p+2.
DistBandwidthSet rot_bandwidth_dist(const DistanceMatrix& dist, std::span<const double> y,
                                    const EstimationConfig& cfg, int threads = 1,
                                    const std::vector<int>* cluster = nullptr);

struct DistEstimateSet {
  std::vector<DistFit> fit_p0, fit_p1, fit_q0, fit_q1;  // q fits at the inference bandwidth
  std::vector<double> tau_p, tau_q, se, se_rbc;
  std::vector<int> n_h0, n_h1;
};

struct DistanceResult {
  DistBandwidthSet bws;
  DistEstimateSet estimates;
  CrossCovariance cross;
  InferenceTable table;
};

/// End-to-end distance path on a prebuilt distance matrix. Grid coordinates
/// are optional (reports omit them when absent).
DistanceResult run_distance_analysis(const DistanceMatrix& dist, std::span<const double> y,
                                     const std::optional<CutoffGrid>& grid,
                                     const std::optional<std::vector<int>>& cluster,
                                     const EstimationConfig& cfg,
                                     const std::optional<std::vector<double>>& aate_weights = {},
                                     int threads = 0);

}  // namespace rd2d
