#include "rd2d/guards.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rd2d {

namespace {

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// bwcheck-th smallest value (1-based), assuming m.size() >= bwcheck.
double order_statistic(std::vector<double>& m, int bwcheck) {
  auto nth = m.begin() + (bwcheck - 1);
  std::nth_element(m.begin(), nth, m.end());
  return *nth;
}

}  // namespace

GuardOutcome enforce_bwcheck(const Dataset& data, double x1, double x2, int group, double h1,
                             double h2, const EstimationConfig& cfg) {
  GuardOutcome out;
  out.h1_original = h1;
  out.h2_original = h2;
  out.h1 = h1;
  out.h2 = h2;
  out.rule = "none";

  std::vector<double> gx1, gx2;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.t[i] != static_cast<std::uint8_t>(group)) continue;
    gx1.push_back(data.x1[i]);
    gx2.push_back(data.x2[i]);
  }
  if (gx1.empty()) throw NumericalError("empty group " + std::to_string(group));

  const bool unique_mode = cfg.masspoint == Masspoint::adjust;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(gx1.size());
  for (std::size_t i = 0; i < gx1.size(); ++i) pts.emplace_back(gx1[i], gx2[i]);
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> uniq(pts);
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  const auto& counted = unique_mode ? uniq : pts;

  const int bwcheck = cfg.bwcheck_loc();
  const bool prod = cfg.kernel_type == KernelType::prod;
  double s1 = 1.0, s2 = 1.0;
  if (prod) {
    s1 = sample_sd(gx1);
    s2 = sample_sd(gx2);
    if (!(s1 > 0.0) || !(s2 > 0.0)) s1 = s2 = 1.0;  // degenerate coordinate
  }

  if (bwcheck > 0) {
    if (static_cast<int>(counted.size()) < bwcheck)
      throw NumericalError("group " + std::to_string(group) + " has only " +
                           std::to_string(counted.size()) + (unique_mode ? " unique" : "") +
                           " points, below bwcheck = " + std::to_string(bwcheck));
    std::vector<double> m;
    m.reserve(counted.size());
    for (const auto& [px, py] : counted) {
      double u1 = px - x1, u2 = py - x2;
      m.push_back(prod ? std::max(std::fabs(u1) / s1, std::fabs(u2) / s2)
                       : std::hypot(u1, u2));
    }
    double radius = order_statistic(m, bwcheck);
    double need1 = prod ? radius * s1 : radius;
    double need2 = prod ? radius * s2 : radius;
    if (!cfg.stdvar) need1 = need2 = std::max(need1, need2);  // keep isotropic bandwidths isotropic
    if (need1 > out.h1 || need2 > out.h2) {
      out.h1 = std::max(out.h1, need1);
      out.h2 = std::max(out.h2, need2);
      out.rule = prod ? "bwcheck_prod" : "bwcheck_rad";
      if (unique_mode) {
        // Did unique counting push past what raw counting would require?
        std::vector<double> mr;
        mr.reserve(pts.size());
        for (const auto& [px, py] : pts) {
          double u1 = px - x1, u2 = py - x2;
          mr.push_back(prod ? std::max(std::fabs(u1) / s1, std::fabs(u2) / s2)
                            : std::hypot(u1, u2));
        }
        if (static_cast<int>(mr.size()) >= bwcheck && radius > order_statistic(mr, bwcheck))
          out.rule = "masspoint_adjust";
      }
    }
  }

  auto in_support = [&](double px, double py) {
    double u1 = px - x1, u2 = py - x2;
    if (prod) return std::fabs(u1) <= out.h1 && std::fabs(u2) <= out.h2;
    double v1 = u1 / out.h1, v2 = u2 / out.h2;
    return v1 * v1 + v2 * v2 <= 1.0;
  };
  for (const auto& [px, py] : pts)
    if (in_support(px, py)) ++out.support_count;
  for (const auto& [px, py] : uniq)
    if (in_support(px, py)) ++out.unique_count;
  return out;
}

GuardOutcome enforce_bwcheck_dist(std::span<const double> dcol, int side, double h,
                                  const EstimationConfig& cfg) {
  GuardOutcome out;
  out.h1_original = out.h2_original = h;
  out.h1 = out.h2 = h;
  out.rule = "none";

  std::vector<double> dist;
  for (double d : dcol) {
    bool treated_side = d >= 0.0;  // ties at zero belong to treatment
    if ((side == 1) == treated_side) dist.push_back(std::fabs(d));
  }
  if (dist.empty()) throw NumericalError("empty side " + std::to_string(side));

  const bool unique_mode = cfg.masspoint == Masspoint::adjust;
  std::sort(dist.begin(), dist.end());
  std::vector<double> uniq(dist);
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<double>& counted = unique_mode ? uniq : dist;

  const int bwcheck = cfg.bwcheck_dist();
  if (bwcheck > 0) {
    if (static_cast<int>(counted.size()) < bwcheck)
      throw NumericalError("side " + std::to_string(side) + " has only " +
                           std::to_string(counted.size()) + (unique_mode ? " unique" : "") +
                           " distances, below bwcheck = " + std::to_string(bwcheck));
    double radius = counted[static_cast<std::size_t>(bwcheck - 1)];  // already sorted
    if (radius > out.h1) {
      out.h1 = out.h2 = radius;
      out.rule = "bwcheck_rad";
      if (unique_mode && static_cast<int>(dist.size()) >= bwcheck &&
          radius > dist[static_cast<std::size_t>(bwcheck - 1)])
        out.rule = "masspoint_adjust";
    }
  }

  for (double d : dist)
    if (d <= out.h1) ++out.support_count;
  for (double d : uniq)
    if (d <= out.h1) ++out.unique_count;
  return out;
}

namespace {

MasspointScan finish_scan(std::size_t unique_count, std::size_t n, const EstimationConfig& cfg) {
  MasspointScan scan;
  scan.unique_count = unique_count;
  scan.duplication_share = n == 0 ? 0.0 : 1.0 - static_cast<double>(unique_count) / static_cast<double>(n);
  switch (cfg.masspoint) {
    case Masspoint::off:
      scan.action = "none";
      return scan;
    case Masspoint::check:
      scan.action = "warn";
      break;
    case Masspoint::adjust:
      scan.action = "adjust";
      break;
  }
  scan.warned = scan.duplication_share > 0.2;
  return scan;
}

}  // namespace

MasspointScan masspoint_scan(const Dataset& data, const EstimationConfig& cfg) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) rows.emplace_back(data.x1[i], data.x2[i]);
  std::sort(rows.begin(), rows.end());
  auto uniq = std::distance(rows.begin(), std::unique(rows.begin(), rows.end()));
  return finish_scan(static_cast<std::size_t>(uniq), data.n(), cfg);
}

MasspointScan masspoint_scan(std::span<const double> dcol, const EstimationConfig& cfg) {
  std::vector<double> d(dcol.begin(), dcol.end());
  std::sort(d.begin(), d.end());
  auto uniq = std::distance(d.begin(), std::unique(d.begin(), d.end()));
  return finish_scan(static_cast<std::size_t>(uniq), d.size(), cfg);
}

}  // namespace rd2d
