#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rd2d {

enum class Kernel { triangular, epanechnikov, uniform };
enum class KernelType { prod, rad };
enum class Vce { hc0, hc1, hc2, hc3 };
enum class BwSelect { mserd, imserd, msetwo, imsetwo };
enum class Masspoint { check, adjust, off };

const char* to_string(Kernel k);
const char* to_string(KernelType t);
const char* to_string(Vce v);
const char* to_string(BwSelect s);
const char* to_string(Masspoint m);

Kernel kernel_from_string(const std::string& s);
KernelType kernel_type_from_string(const std::string& s);
Vce vce_from_string(const std::string& s);
BwSelect bwselect_from_string(const std::string& s);
Masspoint masspoint_from_string(const std::string& s);

/// Base error type. ValidationError: bad inputs/configuration (CLI exit 2).
/// NumericalError: estimation failed on valid inputs (CLI exit 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class NumericalError : public Error {
 public:
  using Error::Error;
};

struct Warning {
  std::string code;
  std::string message;
};

/// Outcomes, bivariate scores, treatment indicators, optional cluster labels.
/// The treatment indicator is taken as given; it is never re-derived from the
/// scores or the grid.
struct Dataset {
  std::vector<double> y;
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<std::uint8_t> t;
  std::optional<std::vector<int>> cluster;  // dense ids 0..G-1

  std::size_t n() const { return y.size(); }
};

/// Ordered boundary evaluation points. Duplicates are allowed (reported, not
/// rejected); kink flags are accepted but only stored.
struct CutoffGrid {
  std::vector<double> b1;
  std::vector<double> b2;
  std::vector<std::string> labels;       // empty or size J
  std::vector<std::uint8_t> kink_flags;  // empty or size J

  std::size_t size() const { return b1.size(); }
};

struct EstimationConfig {
  int p = 1;
  std::optional<int> q_opt;  // resolved as p+1 when unset
  std::pair<int, int> deriv{0, 0};
  Kernel kernel = Kernel::triangular;
  KernelType kernel_type = KernelType::prod;
  double level = 95.0;  // percent
  Vce vce = Vce::hc1;
  bool cluster_on = false;
  BwSelect bwselect = BwSelect::mserd;
  bool stdvar = true;
  Masspoint masspoint = Masspoint::check;
  std::optional<int> bwcheck;  // unset: path default; <= 0 disables the floor
  bool kink = false;           // distance path only
  double reg_factor = 3.0;     // regularization strength s
  int band_draws = 2000;
  std::uint64_t seed = 42;
  std::optional<double> pilot_constant;  // overrides the per-kernel table

  int q() const { return q_opt.value_or(p + 1); }
  double alpha() const { return 1.0 - level / 100.0; }
  int deriv_order() const { return deriv.first + deriv.second; }
  /// Minimum local sample size for the bivariate path: 50 + (2+p)(1+p)/2 - 1.
  int bwcheck_loc() const;
  /// Minimum local sample size for the distance path: 50 + p + 1.
  int bwcheck_dist() const;
};

struct ValidationReport {
  std::size_t n = 0;
  std::size_t grid_points = 0;
  std::size_t n_control = 0;
  std::size_t n_treated = 0;
  std::size_t unique_rows = 0;
  std::size_t unique_control = 0;
  std::size_t unique_treated = 0;
  std::size_t duplicate_grid_points = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_inputs(const Dataset& data, const CutoffGrid& grid,
                                 const EstimationConfig& cfg);

/// Throws ValidationError listing every violation when the report is not ok.
void require_valid(const ValidationReport& report);

struct PilotBandwidths {
  double c_hat = 0.0;
  double b_hat0 = 0.0;
  double b_hat1 = 0.0;
};

/// Per-cutoff bandwidths, group x coordinate, matching the report columns.
struct BandwidthEntry {
  double h01 = 0.0, h02 = 0.0;  // control, coordinates 1 and 2
  double h11 = 0.0, h12 = 0.0;  // treatment
  bool adjusted_control = false;
  bool adjusted_treated = false;
  std::string guard_rule;  // empty when no enlargement was applied
};

struct BandwidthSet {
  std::vector<BandwidthEntry> at;  // one per cutoff
  PilotBandwidths pilot;
  BwSelect selector = BwSelect::mserd;
  bool standardized = true;
  double sigma_x1 = 1.0, sigma_x2 = 1.0;  // sample SDs used to undo stdvar
  // Selection-space diagnostics, one per cutoff (selection space is the
  // standardized score space when stdvar is on).
  std::vector<double> v_const0, v_const1;      // variance constants
  std::vector<double> bias_const0, bias_const1;
  std::vector<double> bias_var0, bias_var1;    // regularization terms
  std::vector<double> h_sel0, h_sel1;          // pre-guard selected bandwidths
};

struct InferenceRow {
  int id = 0;  // 1-based
  double b1 = 0.0, b2 = 0.0;
  double estimate = 0.0;      // p-th order point estimate
  double rbc_estimate = 0.0;  // q-th order estimate centering the intervals
  double se = 0.0;
  double se_rbc = 0.0;
  double z = 0.0;
  double p_value = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  double cb_lo = 0.0, cb_hi = 0.0;
  int n_h0 = 0, n_h1 = 0;
};

struct AateRow {
  double estimate = 0.0;
  double rbc_estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p_value = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
};

struct BandQuantile {
  double alpha = 0.05;
  double q_alpha = 0.0;
  int draws = 0;
  std::uint64_t seed = 0;
  bool floored = false;  // true when the simulated quantile was below the
                         // pointwise normal quantile and got clipped up
};

struct TableMeta {
  std::size_t n = 0;
  std::size_t n_control = 0, n_treated = 0;
  std::size_t unique_control = 0, unique_treated = 0;
  std::string bw_label;      // e.g. "mserd-dpi-std"
  std::string kernel_label;  // e.g. "triangular-prod"
  std::string vce_label;
  std::string masspoint_label;
  std::string kink_label;  // empty for the location path
  int p = 1, q = 2;
  std::pair<int, int> deriv{0, 0};
  double level = 95.0;
  bool show_unique = true;
  bool has_coords = true;  // distance-only runs may lack grid coordinates
};

struct InferenceTable {
  TableMeta meta;
  std::vector<InferenceRow> rows;
  std::optional<AateRow> aate;
  BandQuantile band;
  std::vector<Warning> warnings;
};

}  // namespace rd2d
