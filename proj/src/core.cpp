#include <algorithm>
#include <cmath>
#include <sstream>

#include "rd2d/multi_index.hpp"
#include "rd2d/types.hpp"

namespace rd2d {

const char* to_string(Kernel k) {
  switch (k) {
    case Kernel::triangular: return "triangular";
    case Kernel::epanechnikov: return "epanechnikov";
    case Kernel::uniform: return "uniform";
  }
  return "?";
}
const char* to_string(KernelType t) { return t == KernelType::prod ? "prod" : "rad"; }
const char* to_string(Vce v) {
  switch (v) {
    case Vce::hc0: return "hc0";
    case Vce::hc1: return "hc1";
    case Vce::hc2: return "hc2";
    case Vce::hc3: return "hc3";
  }
  return "?";
}
const char* to_string(BwSelect s) {
  switch (s) {
    case BwSelect::mserd: return "mserd";
    case BwSelect::imserd: return "imserd";
    case BwSelect::msetwo: return "msetwo";
    case BwSelect::imsetwo: return "imsetwo";
  }
  return "?";
}
const char* to_string(Masspoint m) {
  switch (m) {
    case Masspoint::check: return "check";
    case Masspoint::adjust: return "adjust";
    case Masspoint::off: return "off";
  }
  return "?";
}

namespace {
[[noreturn]] void bad_option(const std::string& what, const std::string& value) {
  throw ValidationError("unknown " + what + ": '" + value + "'");
}
}  // namespace

Kernel kernel_from_string(const std::string& s) {
  if (s == "triangular") return Kernel::triangular;
  if (s == "epanechnikov") return Kernel::epanechnikov;
  if (s == "uniform") return Kernel::uniform;
  bad_option("kernel", s);
}
KernelType kernel_type_from_string(const std::string& s) {
  if (s == "prod") return KernelType::prod;
  if (s == "rad") return KernelType::rad;
  bad_option("kernel_type", s);
}
Vce vce_from_string(const std::string& s) {
  if (s == "hc0") return Vce::hc0;
  if (s == "hc1") return Vce::hc1;
  if (s == "hc2") return Vce::hc2;
  if (s == "hc3") return Vce::hc3;
  bad_option("vce", s);
}
BwSelect bwselect_from_string(const std::string& s) {
  if (s == "mserd") return BwSelect::mserd;
  if (s == "imserd") return BwSelect::imserd;
  if (s == "msetwo") return BwSelect::msetwo;
  if (s == "imsetwo") return BwSelect::imsetwo;
  bad_option("bwselect", s);
}
Masspoint masspoint_from_string(const std::string& s) {
  if (s == "check") return Masspoint::check;
  if (s == "adjust") return Masspoint::adjust;
  if (s == "off") return Masspoint::off;
  bad_option("masspoint", s);
}

int EstimationConfig::bwcheck_loc() const {
  if (bwcheck) return *bwcheck;
  return 50 + MultiIndexSet::dimension(p) - 1;
}

int EstimationConfig::bwcheck_dist() const {
  if (bwcheck) return *bwcheck;
  return 50 + p + 1;
}

namespace {

std::size_t count_unique_rows(const Dataset& data, int group) {
  std::vector<std::pair<double, double>> rows;
  rows.reserve(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (group >= 0 && data.t[i] != static_cast<std::uint8_t>(group)) continue;
    rows.emplace_back(data.x1[i], data.x2[i]);
  }
  std::sort(rows.begin(), rows.end());
  return static_cast<std::size_t>(std::distance(rows.begin(), std::unique(rows.begin(), rows.end())));
}

}  // namespace

ValidationReport validate_inputs(const Dataset& data, const CutoffGrid& grid,
                                 const EstimationConfig& cfg) {
  ValidationReport rep;
  rep.n = data.n();
  rep.grid_points = grid.size();
  auto add = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

  if (data.n() == 0) add("empty dataset");
  if (data.x1.size() != data.n() || data.x2.size() != data.n() || data.t.size() != data.n())
    add("length mismatch: y has " + std::to_string(data.n()) + " rows, x1/x2/t have " +
        std::to_string(data.x1.size()) + "/" + std::to_string(data.x2.size()) + "/" +
        std::to_string(data.t.size()));
  if (data.cluster && data.cluster->size() != data.n())
    add("length mismatch: cluster has " + std::to_string(data.cluster->size()) + " rows");
  if (grid.size() == 0) add("empty cutoff grid");

  if (rep.violations.empty()) {
    for (std::size_t i = 0; i < data.n(); ++i) {
      if (!std::isfinite(data.y[i])) {
        add("non-finite outcome y at row " + std::to_string(i));
        break;
      }
    }
    for (std::size_t i = 0; i < data.n(); ++i) {
      if (!std::isfinite(data.x1[i]) || !std::isfinite(data.x2[i])) {
        add("non-finite score at row " + std::to_string(i));
        break;
      }
    }
    for (std::size_t i = 0; i < data.n(); ++i) {
      if (data.t[i] > 1) {
        add("treatment indicator not in {0,1} at row " + std::to_string(i));
        break;
      }
    }
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (!std::isfinite(grid.b1[j]) || !std::isfinite(grid.b2[j])) {
        add("non-finite grid point at index " + std::to_string(j));
        break;
      }
    }
    rep.n_treated = static_cast<std::size_t>(std::count(data.t.begin(), data.t.end(), 1));
    rep.n_control = data.n() - rep.n_treated;
    if (rep.n_control == 0) add("empty control group");
    if (rep.n_treated == 0) add("empty treatment group");
    rep.unique_rows = count_unique_rows(data, -1);
    rep.unique_control = count_unique_rows(data, 0);
    rep.unique_treated = count_unique_rows(data, 1);

    std::vector<std::pair<double, double>> pts;
    pts.reserve(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) pts.emplace_back(grid.b1[j], grid.b2[j]);
    std::sort(pts.begin(), pts.end());
    rep.duplicate_grid_points =
        pts.size() - static_cast<std::size_t>(
                         std::distance(pts.begin(), std::unique(pts.begin(), pts.end())));
  }

  if (cfg.p < 0) add("estimation order p must be >= 0");
  if (cfg.q() < cfg.p) add("inference order q must be >= p");
  if (cfg.deriv.first < 0 || cfg.deriv.second < 0)
    add("derivative orders must be non-negative");
  else if (cfg.deriv_order() > cfg.p)
    add("derivative order " + std::to_string(cfg.deriv_order()) + " exceeds p = " +
        std::to_string(cfg.p));
  if (!(cfg.level > 0.0 && cfg.level < 100.0)) add("level must lie in (0,100)");
  if (cfg.reg_factor < 0.0) add("regularization factor s must be >= 0");
  if (cfg.band_draws < 2) add("band_draws must be >= 2");
  return rep;
}

void require_valid(const ValidationReport& report) {
  if (report.ok()) return;
  std::ostringstream os;
  os << "invalid inputs:";
  for (const auto& v : report.violations) os << "\n  - " << v;
  throw ValidationError(os.str());
}

}  // namespace rd2d
