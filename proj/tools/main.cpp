#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rd2d/bandwidth.hpp"
#include "rd2d/distance.hpp"
#include "rd2d/inference.hpp"
#include "rd2d/io.hpp"
#include "rd2d/parallel.hpp"
#include "rd2d/report.hpp"
#include "rd2d/simulate.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rd2d;

struct CommonArgs {
  std::string data_path, grid_path, dist_path, weights_path;
  std::string out_dir;
  std::string formats = "text,csv,json";
  std::vector<int> subset;
  bool cb_uniform = false;
  std::string aate = "";  // "", "equal", or a CSV path
  std::string report = "estimates";  // or "bw"
  std::string exports;    // comma list of curve,heatmap,pvalue,scatter
  std::string config_path;
  int threads = 0;

  // raw config values (strings resolved into EstimationConfig)
  int p = 1;
  int q = -1;
  std::vector<int> deriv{0, 0};
  std::string kernel = "triangular";
  std::string kernel_type = "prod";
  double level = 95.0;
  std::string vce = "hc1";
  bool cluster = false;
  std::string bwselect = "mserd";
  bool stdvar = true;
  std::string masspoint = "check";
  int bwcheck = -1;
  bool kink = false;
  double reg_s = 3.0;
  int band_draws = 2000;
  std::uint64_t seed = 42;
  double pilot_constant = 0.0;  // 0 = use the kernel table
};

void add_config_flags(CLI::App* cmd, CommonArgs& a, bool distance) {
  cmd->add_option("--p", a.p, "Polynomial order for point estimation");
  cmd->add_option("--q", a.q, "Polynomial order for robust inference (default p+1)");
  cmd->add_option("--deriv", a.deriv, "Derivative orders (two integers)")->expected(2);
  cmd->add_option("--kernel", a.kernel, "Kernel: triangular, epanechnikov, uniform");
  if (!distance)
    cmd->add_option("--kernel-type", a.kernel_type, "Kernel type: prod or rad");
  cmd->add_option("--level", a.level, "Confidence level in percent");
  cmd->add_option("--vce", a.vce, "Variance estimator: hc0, hc1, hc2, hc3");
  cmd->add_flag("--cluster", a.cluster, "Cluster-robust variance (requires a cluster column)");
  cmd->add_option("--bwselect", a.bwselect, "Bandwidth type: mserd, imserd, msetwo, imsetwo");
  cmd->add_flag("--stdvar,!--no-stdvar", a.stdvar, "Per-coordinate standardization");
  cmd->add_option("--masspoint", a.masspoint, "Mass point handling: check, adjust, off");
  cmd->add_option("--bwcheck", a.bwcheck, "Minimum local sample size (0 disables)");
  if (distance) cmd->add_flag("--kink", a.kink, "Kink adjustment for a non-smooth boundary");
  cmd->add_option("--reg-s", a.reg_s, "Bandwidth regularization factor s");
  cmd->add_option("--band-draws", a.band_draws, "Gaussian draws for the uniform band");
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->add_option("--pilot-constant", a.pilot_constant,
                  "Override the per-kernel pilot constant (0 = table value)");
  cmd->add_option("--threads", a.threads, "Worker threads (default: RD2D_THREADS or all cores)");
  cmd->add_option("--out", a.out_dir, "Output directory for report files");
  cmd->add_option("--format", a.formats, "Comma list of outputs: text,csv,json");
  cmd->add_option("--config", a.config_path,
                  "Flat key=value configuration file (command-line flags win)");
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ValidationError("cannot parse boolean value '" + v + "'");
}

// Config-file values fill in any option the command line left untouched.
void apply_config_file(const CLI::App* cmd, CommonArgs& a) {
  if (a.config_path.empty()) return;
  auto fresh = [cmd](const char* name) { return cmd->count(name) == 0; };
  for (const auto& [key, value] : load_config_file(a.config_path)) {
    if (key == "p") { if (fresh("--p")) a.p = std::stoi(value); }
    else if (key == "q") { if (fresh("--q")) a.q = std::stoi(value); }
    else if (key == "deriv") {
      if (fresh("--deriv")) {
        auto comma = value.find(',');
        if (comma == std::string::npos)
          throw ValidationError("deriv expects two comma-separated integers");
        a.deriv = {std::stoi(value.substr(0, comma)), std::stoi(value.substr(comma + 1))};
      }
    }
    else if (key == "kernel") { if (fresh("--kernel")) a.kernel = value; }
    else if (key == "kernel-type" || key == "kernel_type") {
      if (fresh("--kernel-type")) a.kernel_type = value;
    }
    else if (key == "level") { if (fresh("--level")) a.level = std::stod(value); }
    else if (key == "vce") { if (fresh("--vce")) a.vce = value; }
    else if (key == "cluster") { if (fresh("--cluster")) a.cluster = parse_bool(value); }
    else if (key == "bwselect") { if (fresh("--bwselect")) a.bwselect = value; }
    else if (key == "stdvar") { if (fresh("--stdvar")) a.stdvar = parse_bool(value); }
    else if (key == "masspoint") { if (fresh("--masspoint")) a.masspoint = value; }
    else if (key == "bwcheck") { if (fresh("--bwcheck")) a.bwcheck = std::stoi(value); }
    else if (key == "kink") { if (fresh("--kink")) a.kink = parse_bool(value); }
    else if (key == "reg-s" || key == "reg_s") { if (fresh("--reg-s")) a.reg_s = std::stod(value); }
    else if (key == "band-draws" || key == "band_draws") {
      if (fresh("--band-draws")) a.band_draws = std::stoi(value);
    }
    else if (key == "seed") { if (fresh("--seed")) a.seed = std::stoull(value); }
    else if (key == "pilot-constant" || key == "pilot_constant") {
      if (fresh("--pilot-constant")) a.pilot_constant = std::stod(value);
    }
    else if (key == "threads") { if (fresh("--threads")) a.threads = std::stoi(value); }
    else throw ValidationError("unknown config key '" + key + "' in " + a.config_path);
  }
}

EstimationConfig make_config(const CommonArgs& a) {
  EstimationConfig cfg;
  cfg.p = a.p;
  if (a.q >= 0) cfg.q_opt = a.q;
  cfg.deriv = {a.deriv.at(0), a.deriv.at(1)};
  cfg.kernel = kernel_from_string(a.kernel);
  cfg.kernel_type = kernel_type_from_string(a.kernel_type);
  cfg.level = a.level;
  cfg.vce = vce_from_string(a.vce);
  cfg.cluster_on = a.cluster;
  cfg.bwselect = bwselect_from_string(a.bwselect);
  cfg.stdvar = a.stdvar;
  cfg.masspoint = masspoint_from_string(a.masspoint);
  if (a.bwcheck >= 0) cfg.bwcheck = a.bwcheck;
  cfg.kink = a.kink;
  cfg.reg_factor = a.reg_s;
  cfg.band_draws = a.band_draws;
  cfg.seed = a.seed;
  if (a.pilot_constant > 0.0) cfg.pilot_constant = a.pilot_constant;
  return cfg;
}

bool has_format(const CommonArgs& a, const std::string& f) {
  return ("," + a.formats + ",").find("," + f + ",") != std::string::npos;
}

Subset subset_of(const CommonArgs& a) {
  if (a.subset.empty()) return {};
  return a.subset;
}

std::optional<std::vector<double>> aate_weights(const CommonArgs& a, std::size_t j_count) {
  if (a.aate.empty()) return {};
  if (a.aate == "equal") return std::vector<double>(j_count, 1.0);
  return load_weights_csv(a.aate);
}

void write_text(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream out(dir / name);
  if (!out) throw ValidationError("cannot write file: " + (dir / name).string());
  out << text;
}

void emit_outputs(const CommonArgs& a, const std::string& text,
                  const std::function<void(const fs::path&)>& write_machine) {
  std::cout << text;
  if (a.out_dir.empty()) return;
  fs::path dir(a.out_dir);
  fs::create_directories(dir);
  if (has_format(a, "text")) write_text(dir, "report.txt", text);
  write_machine(dir);
}

void write_exports(const CommonArgs& a, const fs::path& dir, const InferenceTable& table,
                   const Dataset* data) {
  auto wants = [&a](const char* kind) {
    return ("," + a.exports + ",").find(std::string(",") + kind + ",") != std::string::npos;
  };
  if (wants("curve")) export_curve_csv((dir / "plot_curve.csv").string(), table);
  if (wants("heatmap")) export_estimate_heatmap_csv((dir / "plot_heatmap.csv").string(), table);
  if (wants("pvalue")) export_pvalue_heatmap_csv((dir / "plot_pvalues.csv").string(), table);
  if (wants("scatter") && data != nullptr)
    export_scatter_csv((dir / "plot_scatter.csv").string(), *data);
}

int cmd_estimate(const CommonArgs& a) {
  EstimationConfig cfg = make_config(a);
  Dataset data = load_data_csv(a.data_path);
  CutoffGrid grid = load_grid_csv(a.grid_path);
  LocationResult res =
      run_location_analysis(data, grid, cfg, aate_weights(a, grid.size()), a.threads);
  std::string text;
  if (a.report == "bw")
    text = render_bw_block("rd2d estimate", res.table, res.bws, grid, subset_of(a));
  else
    text = render_report("rd2d estimate", res.table, a.cb_uniform, subset_of(a));
  emit_outputs(a, text, [&](const fs::path& dir) {
    if (has_format(a, "csv")) {
      write_results_csv((dir / "results.csv").string(), res.table);
      write_bandwidths_csv((dir / "bandwidths.csv").string(), res.bws, grid);
    }
    if (has_format(a, "json")) write_text(dir, "results.json", results_json(res.table));
    write_exports(a, dir, res.table, &data);
  });
  return 0;
}

int cmd_bandwidth(const CommonArgs& a) {
  EstimationConfig cfg = make_config(a);
  Dataset data = load_data_csv(a.data_path);
  CutoffGrid grid = load_grid_csv(a.grid_path);
  ValidationReport vr = validate_inputs(data, grid, cfg);
  require_valid(vr);
  BandwidthSet bws = select_bandwidths(data, grid, cfg, a.threads);
  InferenceTable shell;  // header metadata only
  shell.meta.n = data.n();
  shell.meta.n_control = vr.n_control;
  shell.meta.n_treated = vr.n_treated;
  shell.meta.unique_control = vr.unique_control;
  shell.meta.unique_treated = vr.unique_treated;
  shell.meta.kernel_label = std::string(to_string(cfg.kernel)) + "-" + to_string(cfg.kernel_type);
  shell.meta.vce_label = std::string(to_string(cfg.vce)) + (cfg.cluster_on ? " (cluster)" : "");
  shell.meta.masspoint_label = to_string(cfg.masspoint);
  shell.meta.p = cfg.p;
  shell.meta.q = cfg.q();
  shell.meta.deriv = cfg.deriv;
  shell.meta.level = cfg.level;
  std::string text = render_bandwidth_report("rd2d bandwidth", shell, bws, grid, subset_of(a));
  emit_outputs(a, text, [&](const fs::path& dir) {
    if (has_format(a, "csv")) write_bandwidths_csv((dir / "bandwidths.csv").string(), bws, grid);
  });
  return 0;
}

struct DistInputs {
  DistanceMatrix dist;
  std::optional<CutoffGrid> grid;
  std::vector<double> y;
  std::optional<std::vector<int>> cluster;
};

DistInputs load_dist_inputs(const CommonArgs& a) {
  DistInputs in;
  if (!a.dist_path.empty()) {
    in.dist = load_distance_csv(a.dist_path);
    Dataset data = load_data_csv(a.data_path);
    in.y = data.y;
    in.cluster = data.cluster;
    if (!a.grid_path.empty()) in.grid = load_grid_csv(a.grid_path);
    if (in.dist.n != in.y.size())
      throw ValidationError("distance matrix rows do not match the data rows");
  } else {
    Dataset data = load_data_csv(a.data_path);
    CutoffGrid grid = load_grid_csv(a.grid_path);
    EstimationConfig cfg = make_config(a);
    require_valid(validate_inputs(data, grid, cfg));
    in.dist = build_distances(data, grid);
    in.grid = grid;
    in.y = data.y;
    in.cluster = data.cluster;
  }
  return in;
}

int cmd_estimate_dist(const CommonArgs& a) {
  EstimationConfig cfg = make_config(a);
  DistInputs in = load_dist_inputs(a);
  DistanceResult res = run_distance_analysis(in.dist, in.y, in.grid, in.cluster, cfg,
                                             aate_weights(a, in.dist.j_count), a.threads);
  std::string text;
  if (a.report == "bw")
    text = render_bandwidth_report_dist("rd2d estimate-dist", res.table, res.bws, in.grid,
                                        subset_of(a));
  else
    text = render_report("rd2d estimate-dist", res.table, a.cb_uniform, subset_of(a));
  emit_outputs(a, text, [&](const fs::path& dir) {
    if (has_format(a, "csv")) {
      write_results_csv((dir / "results.csv").string(), res.table);
      write_bandwidths_csv_dist((dir / "bandwidths.csv").string(), res.bws, in.grid);
    }
    if (has_format(a, "json")) write_text(dir, "results.json", results_json(res.table));
    write_exports(a, dir, res.table, nullptr);
  });
  return 0;
}

int cmd_bandwidth_dist(const CommonArgs& a) {
  EstimationConfig cfg = make_config(a);
  DistInputs in = load_dist_inputs(a);
  DistBandwidthSet bws = rot_bandwidth_dist(in.dist, in.y, cfg, a.threads,
                                            in.cluster ? &*in.cluster : nullptr);
  InferenceTable shell;
  shell.meta.n = in.dist.n;
  std::size_t treated = 0;
  for (double d : in.dist.column(0))
    if (d >= 0.0) ++treated;
  shell.meta.n_treated = treated;
  shell.meta.n_control = in.dist.n - treated;
  shell.meta.kernel_label = std::string(to_string(cfg.kernel)) + "-rad";
  shell.meta.vce_label = std::string(to_string(cfg.vce)) + (cfg.cluster_on ? " (cluster)" : "");
  shell.meta.masspoint_label = to_string(cfg.masspoint);
  shell.meta.kink_label = cfg.kink ? "on" : "off";
  shell.meta.p = cfg.p;
  shell.meta.q = cfg.kink ? cfg.p : cfg.q();
  shell.meta.deriv = cfg.deriv;
  shell.meta.level = cfg.level;
  shell.meta.show_unique = false;
  std::string text =
      render_bandwidth_report_dist("rd2d bandwidth-dist", shell, bws, in.grid, subset_of(a));
  emit_outputs(a, text, [&](const fs::path& dir) {
    if (has_format(a, "csv"))
      write_bandwidths_csv_dist((dir / "bandwidths.csv").string(), bws, in.grid);
  });
  return 0;
}

struct SimArgs {
  CommonArgs common;
  int dgp = 1;
  std::size_t n = 20000;
  int m = 1000;
  std::string method = "loc";
  bool reported_grid = true;
  std::string emit_data;
};

int cmd_simulate(const SimArgs& s) {
  const CommonArgs& a = s.common;
  EstimationConfig cfg = make_config(a);
  DGPSpec spec = DGPSpec::dgp(s.dgp, s.n, a.seed);
  CutoffGrid grid;
  if (!a.grid_path.empty())
    grid = load_grid_csv(a.grid_path);
  else
    grid = s.reported_grid ? boundary_grid_reported() : boundary_grid_full();

  if (!s.emit_data.empty()) {
    Dataset one = generate(spec);
    write_data_csv(s.emit_data, one);
  }

  MCReport report = run_mc(spec, grid, cfg, mc_method_from_string(s.method), s.m, a.threads);
  std::string text = render_mc_report(report);
  std::cout << text;
  if (!a.out_dir.empty()) {
    fs::path dir(a.out_dir);
    fs::create_directories(dir);
    if (has_format(a, "text")) write_text(dir, "mc_report.txt", text);
    if (has_format(a, "csv"))
      write_mc_csv((dir / ("mc_" + s.method + ".csv")).string(), report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Local polynomial estimation and inference for treatment effects along a "
      "two-dimensional assignment boundary"};
  app.require_subcommand(1);

  CommonArgs est, bw, estd, bwd;
  SimArgs sim;

  auto* c_est = app.add_subcommand("estimate", "Location-based estimation and inference");
  c_est->add_option("--data", est.data_path, "Data CSV (y,x1,x2,t[,cluster])")->required();
  c_est->add_option("--grid", est.grid_path, "Cutoff grid CSV (b1,b2[,label][,kink])")->required();
  c_est->add_option("--subset", est.subset, "1-based cutoff ids to print");
  c_est->add_flag("--cb-uniform", est.cb_uniform, "Print uniform bands instead of intervals");
  c_est->add_option("--aate-weights", est.aate, "AATE weights: 'equal' or a CSV path");
  c_est->add_option("--report", est.report, "Body: 'estimates' (default) or 'bw'");
  c_est->add_option("--export", est.exports,
                    "Comma list of plot-data exports: curve,heatmap,pvalue,scatter");
  add_config_flags(c_est, est, false);

  auto* c_bw = app.add_subcommand("bandwidth", "Data-driven bandwidth selection");
  c_bw->add_option("--data", bw.data_path, "Data CSV")->required();
  c_bw->add_option("--grid", bw.grid_path, "Cutoff grid CSV")->required();
  c_bw->add_option("--subset", bw.subset, "1-based cutoff ids to print");
  add_config_flags(c_bw, bw, false);

  auto* c_estd = app.add_subcommand("estimate-dist", "Distance-based estimation and inference");
  c_estd->add_option("--data", estd.data_path, "Data CSV")->required();
  c_estd->add_option("--grid", estd.grid_path, "Cutoff grid CSV");
  c_estd->add_option("--dist", estd.dist_path, "Precomputed signed distance CSV");
  c_estd->add_option("--subset", estd.subset, "1-based cutoff ids to print");
  c_estd->add_flag("--cb-uniform", estd.cb_uniform, "Print uniform bands instead of intervals");
  c_estd->add_option("--aate-weights", estd.aate, "AATE weights: 'equal' or a CSV path");
  c_estd->add_option("--report", estd.report, "Body: 'estimates' (default) or 'bw'");
  c_estd->add_option("--export", estd.exports,
                     "Comma list of plot-data exports: curve,heatmap,pvalue");
  add_config_flags(c_estd, estd, true);

  auto* c_bwd = app.add_subcommand("bandwidth-dist", "Distance-path bandwidth selection");
  c_bwd->add_option("--data", bwd.data_path, "Data CSV")->required();
  c_bwd->add_option("--grid", bwd.grid_path, "Cutoff grid CSV");
  c_bwd->add_option("--dist", bwd.dist_path, "Precomputed signed distance CSV");
  c_bwd->add_option("--subset", bwd.subset, "1-based cutoff ids to print");
  add_config_flags(c_bwd, bwd, true);

  auto* c_sim = app.add_subcommand("simulate", "Calibrated Monte Carlo study");
  c_sim->add_option("--dgp", sim.dgp, "Synthetic design: 1 (linear) or 2 (quadratic)");
  c_sim->add_option("--n", sim.n, "Sample size per replication");
  c_sim->add_option("--m", sim.m, "Number of replications");
  c_sim->add_option("--method", sim.method, "loc, dist-off, or dist-on");
  c_sim->add_option("--grid", sim.common.grid_path, "Cutoff grid CSV (default: built-in)");
  bool full_grid = false;
  c_sim->add_flag("--full-grid", full_grid, "Use the full 40-point built-in grid");
  c_sim->add_option("--emit-data", sim.emit_data, "Also write one generated dataset CSV");
  add_config_flags(c_sim, sim.common, true);

  try {
    app.parse(argc, argv);
    sim.reported_grid = !full_grid;
    apply_config_file(c_est, est);
    apply_config_file(c_bw, bw);
    apply_config_file(c_estd, estd);
    apply_config_file(c_bwd, bwd);
    apply_config_file(c_sim, sim.common);
    if (c_est->parsed()) return cmd_estimate(est);
    if (c_bw->parsed()) return cmd_bandwidth(bw);
    if (c_estd->parsed()) return cmd_estimate_dist(estd);
    if (c_bwd->parsed()) return cmd_bandwidth_dist(bwd);
    if (c_sim->parsed()) return cmd_simulate(sim);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const rd2d::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const rd2d::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
