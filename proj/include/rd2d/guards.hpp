#pragma once

#include <span>
#include <string>

#include "rd2d/types.hpp"

namespace rd2d {

struct GuardOutcome {
  double h1_original = 0.0, h2_original = 0.0;
  double h1 = 0.0, h2 = 0.0;  // adjusted (>= original componentwise)
  std::string rule;           // "none", "bwcheck_prod", "bwcheck_rad", "masspoint_adjust"
  int support_count = 0;      // group points inside the closed kernel support
  int unique_count = 0;       // unique such points
};

/// Enlarges (h1,h2) until the kernel support contains at least bwcheck
/// in-group points: for prod kernels the smallest rectangle centered at the
/// evaluation point with edges proportional to the group score SDs holding
/// bwcheck points; for rad kernels the smallest ball. Under
/// masspoint = adjust, bwcheck counts unique points. Ties at the deciding
/// order statistic are included. Throws when the group has fewer than
/// bwcheck points in total.
GuardOutcome enforce_bwcheck(const Dataset& data, double x1, double x2, int group, double h1,
                             double h2, const EstimationConfig& cfg);

/// Distance-path variant on one side of the cutoff: the kernel must cover at
/// least bwcheck absolute distances. side selects d >= 0 (1) or d < 0 (0).
GuardOutcome enforce_bwcheck_dist(std::span<const double> dcol, int side, double h,
                                  const EstimationConfig& cfg);

struct MasspointScan {
  std::size_t unique_count = 0;
  double duplication_share = 0.0;  // 1 - unique/n
  std::string action;              // "none", "warn", "adjust"
  bool warned = false;
};

/// Duplication scan over score rows; warns when more than 20% of rows are
/// duplicates (masspoint = check or adjust).
MasspointScan masspoint_scan(const Dataset& data, const EstimationConfig& cfg);
MasspointScan masspoint_scan(std::span<const double> dcol, const EstimationConfig& cfg);

}  // namespace rd2d
