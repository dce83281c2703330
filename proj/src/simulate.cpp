#include "rd2d/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rd2d/distance.hpp"
#include "rd2d/io.hpp"
#include "rd2d/inference.hpp"
#include "rd2d/parallel.hpp"
#include "rd2d/rng.hpp"

namespace rd2d {

DGPSpec DGPSpec::dgp(int which, std::size_t n, std::uint64_t seed) {
  DGPSpec s;
  s.n = n;
  s.seed = seed;
  if (which == 1) {
    s.beta0 = {2 * 3.35e-1, 2 * 2.52e-3, -2 * 1.72e-3, 0.0, 0.0, 0.0};
    s.beta1 = {2 * 6.98e-1, 2 * 2.74e-3, -2 * 6.05e-4, 0.0, 0.0, 0.0};
    s.sigma0 = 3.32e-1;
    s.sigma1 = 4.35e-1;
  } else if (which == 2) {
    s.beta0 = {2 * 3.72e-1, 2 * 4.23e-3, -2 * 2.45e-3, 2 * 1.25e-5, -2 * 4.92e-6, 2 * 3.12e-5};
    s.beta1 = {2 * 7.435e-1, 2 * 2.29e-3, -2 * 5.85e-3, -2 * 1.33e-7, 2 * 2.14e-5, 2 * 1.04e-4};
    s.sigma0 = 3.31e-1;
    s.sigma1 = 4.35e-1;
  } else {
    throw ValidationError("unknown synthetic design " + std::to_string(which));
  }
  return s;
}

namespace {

// RNG stream tags within one generated dataset.
enum : std::uint64_t { kStreamX1 = 0, kStreamX2 = 1, kStreamE0 = 2, kStreamE1 = 3 };

double mean_surface(const std::array<double, 6>& b, double x1, double x2) {
  return b[0] + x1 * b[1] + x2 * b[2] + x1 * x1 * b[3] + x2 * x2 * b[4] + x1 * x2 * b[5];
}

}  // namespace

Dataset generate(const DGPSpec& spec) {
  if (spec.n < 1) throw ValidationError("generate requires n >= 1");
  CounterRng rng(spec.seed);
  Dataset data;
  data.y.resize(spec.n);
  data.x1.resize(spec.n);
  data.x2.resize(spec.n);
  data.t.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    double x1 = 100.0 * beta34_icdf(rng.uniform(kStreamX1, i)) - 25.0;
    double x2 = 100.0 * beta34_icdf(rng.uniform(kStreamX2, i)) - 25.0;
    bool treated = x1 >= 0.0 && x2 >= 0.0;
    double y0 = mean_surface(spec.beta0, x1, x2) + spec.sigma0 * rng.normal(kStreamE0, i);
    double y1 = mean_surface(spec.beta1, x1, x2) + spec.sigma1 * rng.normal(kStreamE1, i);
    data.x1[i] = x1;
    data.x2[i] = x2;
    data.t[i] = treated ? 1 : 0;
    data.y[i] = treated ? y1 : y0;
  }
  return data;
}

std::vector<double> true_tau(const DGPSpec& spec, const CutoffGrid& grid) {
  std::vector<double> tau(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    tau[j] = mean_surface(spec.beta1, grid.b1[j], grid.b2[j]) -
             mean_surface(spec.beta0, grid.b1[j], grid.b2[j]);
  return tau;
}

CutoffGrid boundary_grid_full() {
  CutoffGrid grid;
  for (int i = 0; i < 20; ++i) {
    grid.b1.push_back(0.0);
    grid.b2.push_back(50.0 - 2.5 * i);
  }
  for (int i = 0; i < 20; ++i) {
    grid.b1.push_back(2.5 * i);
    grid.b2.push_back(0.0);
  }
  grid.kink_flags.assign(40, 0);
  grid.kink_flags[20] = 1;  // the corner (0,0)
  for (int i = 1; i <= 40; ++i) grid.labels.push_back(std::to_string(i));
  return grid;
}

CutoffGrid boundary_grid_reported() {
  CutoffGrid full = boundary_grid_full();
  CutoffGrid grid;
  for (int id : {1, 5, 10, 15, 21, 25, 30, 35, 40}) {
    std::size_t j = static_cast<std::size_t>(id - 1);
    grid.b1.push_back(full.b1[j]);
    grid.b2.push_back(full.b2[j]);
    grid.labels.push_back(std::to_string(id));
    grid.kink_flags.push_back(full.kink_flags[j]);
  }
  return grid;
}

McMethod mc_method_from_string(const std::string& s) {
  if (s == "loc") return McMethod::loc;
  if (s == "dist-off" || s == "dist_off") return McMethod::dist_off;
  if (s == "dist-on" || s == "dist_on") return McMethod::dist_on;
  throw ValidationError("unknown method '" + s + "' (expected loc, dist-off, dist-on)");
}

const char* to_string(McMethod m) {
  switch (m) {
    case McMethod::loc: return "loc";
    case McMethod::dist_off: return "dist-off";
    case McMethod::dist_on: return "dist-on";
  }
  return "?";
}

namespace {

struct RepOutcome {
  bool ok = false;
  std::vector<double> tau;      // point estimates
  std::vector<double> ci_lo, ci_hi;
  std::vector<double> cb_lo, cb_hi;
  std::vector<double> h;        // reported per-cutoff bandwidth
};

RepOutcome run_one(const DGPSpec& spec, const CutoffGrid& grid, const EstimationConfig& cfg,
                   McMethod method, std::uint64_t rep_seed) {
  DGPSpec rep_spec = spec;
  rep_spec.seed = rep_seed;
  Dataset data = generate(rep_spec);
  EstimationConfig rep_cfg = cfg;
  rep_cfg.seed = rep_seed;
  rep_cfg.kink = method == McMethod::dist_on;

  RepOutcome out;
  const std::size_t J = grid.size();
  out.tau.resize(J);
  out.ci_lo.resize(J);
  out.ci_hi.resize(J);
  out.cb_lo.resize(J);
  out.cb_hi.resize(J);
  out.h.resize(J);

  if (method == McMethod::loc) {
    LocationResult res = run_location_analysis(data, grid, rep_cfg, {}, 1);
    for (std::size_t j = 0; j < J; ++j) {
      const auto& row = res.table.rows[j];
      const auto& e = res.bws.at[j];
      out.tau[j] = row.estimate;
      out.ci_lo[j] = row.ci_lo;
      out.ci_hi[j] = row.ci_hi;
      out.cb_lo[j] = row.cb_lo;
      out.cb_hi[j] = row.cb_hi;
      out.h[j] = 0.25 * (e.h01 + e.h02 + e.h11 + e.h12);
    }
  } else {
    DistanceMatrix dist = build_distances(data, grid);
    DistanceResult res = run_distance_analysis(dist, data.y, grid, {}, rep_cfg, {}, 1);
    for (std::size_t j = 0; j < J; ++j) {
      const auto& row = res.table.rows[j];
      const auto& e = res.bws.at[j];
      out.tau[j] = row.estimate;
      out.ci_lo[j] = row.ci_lo;
      out.ci_hi[j] = row.ci_hi;
      out.cb_lo[j] = row.cb_lo;
      out.cb_hi[j] = row.cb_hi;
      out.h[j] = 0.5 * (e.h0 + e.h1);
    }
  }
  out.ok = true;
  return out;
}

}  // namespace

MCReport run_mc(const DGPSpec& spec, const CutoffGrid& grid, const EstimationConfig& cfg,
                McMethod method, int m, int threads) {
  if (m < 2) throw ValidationError("run_mc requires at least 2 replications");
  const std::size_t J = grid.size();
  std::vector<double> truth = true_tau(spec, grid);

  std::vector<RepOutcome> reps(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), threads, [&](std::size_t r) {
    std::uint64_t rep_seed = CounterRng::derive(spec.seed, r);
    try {
      reps[r] = run_one(spec, grid, cfg, method, rep_seed);
    } catch (const Error&) {
      reps[r].ok = false;
    }
  });

  MCReport report;
  report.method = method;
  report.replications = m;
  for (const auto& rep : reps)
    if (!rep.ok) ++report.failures;
  if (report.failures * 100 > m)
    throw NumericalError("Monte Carlo run aborted: " + std::to_string(report.failures) + " of " +
                         std::to_string(m) + " replications failed (above 1%)");
  const int m_ok = m - report.failures;

  report.rows.resize(J);
  report.estimates.reserve(static_cast<std::size_t>(m_ok) * J);
  for (const auto& rep : reps) {
    if (!rep.ok) continue;
    for (std::size_t j = 0; j < J; ++j) report.estimates.push_back(rep.tau[j]);
  }

  int cb_all_count = 0;
  double cb_len_sum = 0.0;
  for (const auto& rep : reps) {
    if (!rep.ok) continue;
    bool covers_all = true;
    for (std::size_t j = 0; j < J; ++j) {
      covers_all = covers_all && rep.cb_lo[j] <= truth[j] && truth[j] <= rep.cb_hi[j];
      cb_len_sum += rep.cb_hi[j] - rep.cb_lo[j];
    }
    if (covers_all) ++cb_all_count;
  }
  report.uniform_ec = static_cast<double>(cb_all_count) / m_ok;
  report.uniform_il = cb_len_sum / (static_cast<double>(m_ok) * static_cast<double>(J));

  for (std::size_t j = 0; j < J; ++j) {
    MCRow& row = report.rows[j];
    row.index = grid.labels.empty() ? std::to_string(j + 1) : grid.labels[j];
    double sum = 0.0, h_sum = 0.0, len_sum = 0.0;
    int cover = 0;
    for (const auto& rep : reps) {
      if (!rep.ok) continue;
      sum += rep.tau[j];
      h_sum += rep.h[j];
      len_sum += rep.ci_hi[j] - rep.ci_lo[j];
      if (rep.ci_lo[j] <= truth[j] && truth[j] <= rep.ci_hi[j]) ++cover;
    }
    double mean = sum / m_ok;
    double ss = 0.0;
    for (const auto& rep : reps) {
      if (!rep.ok) continue;
      ss += (rep.tau[j] - mean) * (rep.tau[j] - mean);
    }
    row.h_mean = h_sum / m_ok;
    row.bias = mean - truth[j];
    row.sd = std::sqrt(ss / m_ok);  // 1/m so rmse^2 = bias^2 + sd^2 exactly
    row.rmse = std::sqrt(row.bias * row.bias + row.sd * row.sd);
    row.ec = static_cast<double>(cover) / m_ok;
    row.il = len_sum / m_ok;
  }
  return report;
}

void write_mc_csv(const std::string& path, const MCReport& report) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "Method,Index,h,Bias,SD,RMSE,EC,IL\n";
  for (const auto& r : report.rows) {
    out << to_string(report.method) << ',' << r.index << ',' << format_full(r.h_mean) << ','
        << format_full(r.bias) << ',' << format_full(r.sd) << ',' << format_full(r.rmse) << ','
        << format_full(r.ec) << ',' << format_full(r.il) << '\n';
  }
  out << to_string(report.method) << ",Uniform,,,,," << format_full(report.uniform_ec) << ','
      << format_full(report.uniform_il) << '\n';
}

std::string render_mc_report(const MCReport& report) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s%8s%9s%9s%9s%9s%9s%9s", "Method", "Index", "h", "Bias",
                "SD", "RMSE", "EC", "IL");
  os << buf << "\n";
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof(buf), "%-10s%8s%9.3f%9.3f%9.3f%9.3f%9.3f%9.3f",
                  to_string(report.method), r.index.c_str(), r.h_mean, r.bias, r.sd, r.rmse, r.ec,
                  r.il);
    os << buf << "\n";
  }
  std::snprintf(buf, sizeof(buf), "%-10s%8s%9s%9s%9s%9s%9.3f%9.3f", to_string(report.method),
                "Uniform", "", "", "", "", report.uniform_ec, report.uniform_il);
  os << buf << "\n";
  if (report.failures > 0)
    os << "excluded " << report.failures << " failed replication(s) of " << report.replications
       << "\n";
  return os.str();
}

}  // namespace rd2d
