#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "rd2d/bandwidth.hpp"
#include "rd2d/distance.hpp"
#include "rd2d/inference.hpp"
#include "rd2d/report.hpp"
#include "rd2d/simulate.hpp"

namespace py = pybind11;
using namespace rd2d;

namespace {

std::vector<double> to_vec(const py::object& o) {
  auto a = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(o);
  if (!a) throw ValidationError("expected a numeric array");
  auto buf = a.request();
  const double* p = static_cast<const double*>(buf.ptr);
  return std::vector<double>(p, p + buf.size);
}

Dataset make_dataset(const py::array& y, const py::array& x1, const py::array& x2,
                     const py::array& t, const py::object& cluster) {
  Dataset d;
  d.y = to_vec(y);
  d.x1 = to_vec(x1);
  d.x2 = to_vec(x2);
  for (double v : to_vec(t)) d.t.push_back(v != 0.0 ? 1 : 0);
  if (!cluster.is_none()) {
    std::vector<int> ids;
    for (double v : to_vec(cluster)) ids.push_back(static_cast<int>(v));
    d.cluster = std::move(ids);
  }
  return d;
}

CutoffGrid make_grid(const py::object& b1, const py::object& b2) {
  CutoffGrid g;
  g.b1 = to_vec(b1);
  g.b2 = to_vec(b2);
  return g;
}

EstimationConfig config_from_kwargs(const py::kwargs& kw) {
  EstimationConfig cfg;
  for (auto item : kw) {
    std::string key = py::cast<std::string>(item.first);
    py::handle v = item.second;
    if (key == "p") cfg.p = py::cast<int>(v);
    else if (key == "q") cfg.q_opt = py::cast<int>(v);
    else if (key == "deriv") cfg.deriv = py::cast<std::pair<int, int>>(v);
    else if (key == "kernel") cfg.kernel = kernel_from_string(py::cast<std::string>(v));
    else if (key == "kernel_type") cfg.kernel_type = kernel_type_from_string(py::cast<std::string>(v));
    else if (key == "level") cfg.level = py::cast<double>(v);
    else if (key == "vce") cfg.vce = vce_from_string(py::cast<std::string>(v));
    else if (key == "cluster_on") cfg.cluster_on = py::cast<bool>(v);
    else if (key == "bwselect") cfg.bwselect = bwselect_from_string(py::cast<std::string>(v));
    else if (key == "stdvar") cfg.stdvar = py::cast<bool>(v);
    else if (key == "masspoint") cfg.masspoint = masspoint_from_string(py::cast<std::string>(v));
    else if (key == "bwcheck") cfg.bwcheck = py::cast<int>(v);
    else if (key == "kink") cfg.kink = py::cast<bool>(v);
    else if (key == "reg_factor") cfg.reg_factor = py::cast<double>(v);
    else if (key == "band_draws") cfg.band_draws = py::cast<int>(v);
    else if (key == "seed") cfg.seed = py::cast<std::uint64_t>(v);
    else if (key == "pilot_constant") cfg.pilot_constant = py::cast<double>(v);
    else if (key == "threads") { /* handled by caller */ }
    else throw ValidationError("unknown option '" + key + "'");
  }
  return cfg;
}

int threads_from_kwargs(const py::kwargs& kw) {
  if (kw.contains("threads")) return py::cast<int>(kw["threads"]);
  return 0;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(double));
  return a;
}

py::array_t<int> to_array(const std::vector<int>& v) {
  py::array_t<int> a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::memcpy(a.mutable_data(), v.data(), v.size() * sizeof(int));
  return a;
}

py::dict table_to_dict(const InferenceTable& t) {
  std::vector<double> b1, b2, est, rbc, se, se_rbc, z, p, ci_lo, ci_hi, cb_lo, cb_hi;
  std::vector<int> id, nh0, nh1;
  for (const auto& r : t.rows) {
    id.push_back(r.id);
    b1.push_back(r.b1);
    b2.push_back(r.b2);
    est.push_back(r.estimate);
    rbc.push_back(r.rbc_estimate);
    se.push_back(r.se);
    se_rbc.push_back(r.se_rbc);
    z.push_back(r.z);
    p.push_back(r.p_value);
    ci_lo.push_back(r.ci_lo);
    ci_hi.push_back(r.ci_hi);
    cb_lo.push_back(r.cb_lo);
    cb_hi.push_back(r.cb_hi);
    nh0.push_back(r.n_h0);
    nh1.push_back(r.n_h1);
  }
  py::dict d;
  d["id"] = to_array(id);
  d["b1"] = to_array(b1);
  d["b2"] = to_array(b2);
  d["est"] = to_array(est);
  d["rbc_est"] = to_array(rbc);
  d["se"] = to_array(se);
  d["se_rbc"] = to_array(se_rbc);
  d["z"] = to_array(z);
  d["p"] = to_array(p);
  d["ci_lo"] = to_array(ci_lo);
  d["ci_hi"] = to_array(ci_hi);
  d["cb_lo"] = to_array(cb_lo);
  d["cb_hi"] = to_array(cb_hi);
  d["nh0"] = to_array(nh0);
  d["nh1"] = to_array(nh1);
  d["q_alpha"] = t.band.q_alpha;
  d["band_draws"] = t.band.draws;
  std::vector<std::string> warnings;
  for (const auto& w : t.warnings) warnings.push_back(w.message);
  d["warnings"] = warnings;
  if (t.aate) {
    py::dict a;
    a["est"] = t.aate->estimate;
    a["rbc_est"] = t.aate->rbc_estimate;
    a["se"] = t.aate->se;
    a["z"] = t.aate->z;
    a["p"] = t.aate->p_value;
    a["ci_lo"] = t.aate->ci_lo;
    a["ci_hi"] = t.aate->ci_hi;
    d["aate"] = a;
  }
  return d;
}

py::dict bws_to_dict(const BandwidthSet& b) {
  std::vector<double> h01, h02, h11, h12;
  std::vector<int> adjusted;
  for (const auto& e : b.at) {
    h01.push_back(e.h01);
    h02.push_back(e.h02);
    h11.push_back(e.h11);
    h12.push_back(e.h12);
    adjusted.push_back(e.adjusted_control || e.adjusted_treated ? 1 : 0);
  }
  py::dict d;
  d["h01"] = to_array(h01);
  d["h02"] = to_array(h02);
  d["h11"] = to_array(h11);
  d["h12"] = to_array(h12);
  d["adjusted"] = to_array(adjusted);
  d["c_hat"] = b.pilot.c_hat;
  d["b_hat0"] = b.pilot.b_hat0;
  d["b_hat1"] = b.pilot.b_hat1;
  d["selector"] = std::string(to_string(b.selector));
  return d;
}

py::dict dist_bws_to_dict(const DistBandwidthSet& b) {
  std::vector<double> h0, h1, h0i, h1i;
  std::vector<int> adjusted;
  for (const auto& e : b.at) {
    h0.push_back(e.h0);
    h1.push_back(e.h1);
    h0i.push_back(e.h0_inf);
    h1i.push_back(e.h1_inf);
    adjusted.push_back(e.adjusted_control || e.adjusted_treated ? 1 : 0);
  }
  py::dict d;
  d["h0"] = to_array(h0);
  d["h1"] = to_array(h1);
  d["h0_inf"] = to_array(h0i);
  d["h1_inf"] = to_array(h1i);
  d["adjusted"] = to_array(adjusted);
  d["kink"] = b.kink;
  d["selector"] = std::string(to_string(b.selector));
  return d;
}

DistanceMatrix make_dist(const py::array_t<double, py::array::c_style | py::array::forcecast>& d) {
  auto buf = d.request();
  if (buf.ndim != 2) throw ValidationError("distance matrix must be 2-dimensional");
  DistanceMatrix dist;
  dist.n = static_cast<std::size_t>(buf.shape[0]);
  dist.j_count = static_cast<std::size_t>(buf.shape[1]);
  dist.values.resize(dist.n * dist.j_count);
  const double* p = static_cast<const double*>(buf.ptr);
  for (std::size_t i = 0; i < dist.n; ++i)
    for (std::size_t j = 0; j < dist.j_count; ++j)
      dist.values[j * dist.n + i] = p[i * dist.j_count + j];
  return dist;
}

std::optional<std::vector<double>> weights_opt(const py::object& w) {
  if (w.is_none()) return {};
  return to_vec(py::cast<py::array_t<double>>(w));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Local polynomial treatment effect estimation along a bivariate assignment boundary";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.def(
      "generate_dgp",
      [](int dgp, std::size_t n, std::uint64_t seed) {
        Dataset d = generate(DGPSpec::dgp(dgp, n, seed));
        py::dict out;
        out["y"] = to_array(d.y);
        out["x1"] = to_array(d.x1);
        out["x2"] = to_array(d.x2);
        std::vector<int> t(d.t.begin(), d.t.end());
        out["t"] = to_array(t);
        return out;
      },
      py::arg("dgp"), py::arg("n"), py::arg("seed") = 42,
      "Draw one calibrated synthetic dataset (designs 1 and 2)");

  m.def(
      "true_tau",
      [](int dgp, const py::array& b1, const py::array& b2) {
        return to_array(true_tau(DGPSpec::dgp(dgp, 1, 0), make_grid(b1, b2)));
      },
      py::arg("dgp"), py::arg("b1"), py::arg("b2"),
      "Population treatment effect curve at the grid points");

  m.def(
      "boundary_grid",
      [](bool full) {
        CutoffGrid g = full ? boundary_grid_full() : boundary_grid_reported();
        py::dict out;
        out["b1"] = to_array(g.b1);
        out["b2"] = to_array(g.b2);
        out["label"] = g.labels;
        return out;
      },
      py::arg("full") = false, "Built-in L-shaped evaluation grid (full=40 points, else 9)");

  m.def(
      "estimate",
      [](const py::array& y, const py::array& x1, const py::array& x2, const py::array& t,
         const py::array& b1, const py::array& b2, const py::object& cluster,
         const py::object& aate_w, const py::kwargs& kw) {
        EstimationConfig cfg = config_from_kwargs(kw);
        Dataset data = make_dataset(y, x1, x2, t, cluster);
        CutoffGrid grid = make_grid(b1, b2);
        LocationResult res =
            run_location_analysis(data, grid, cfg, weights_opt(aate_w), threads_from_kwargs(kw));
        py::dict out = table_to_dict(res.table);
        out["bandwidths"] = bws_to_dict(res.bws);
        out["report"] = render_report("rd2d estimate", res.table);
        return out;
      },
      py::arg("y"), py::arg("x1"), py::arg("x2"), py::arg("t"), py::arg("b1"), py::arg("b2"),
      py::arg("cluster") = py::none(), py::arg("aate_weights") = py::none(),
      "Location-based estimation and inference over the cutoff grid");

  m.def(
      "bandwidths",
      [](const py::array& y, const py::array& x1, const py::array& x2, const py::array& t,
         const py::array& b1, const py::array& b2, const py::object& cluster,
         const py::kwargs& kw) {
        EstimationConfig cfg = config_from_kwargs(kw);
        Dataset data = make_dataset(y, x1, x2, t, cluster);
        CutoffGrid grid = make_grid(b1, b2);
        require_valid(validate_inputs(data, grid, cfg));
        return bws_to_dict(select_bandwidths(data, grid, cfg, threads_from_kwargs(kw)));
      },
      py::arg("y"), py::arg("x1"), py::arg("x2"), py::arg("t"), py::arg("b1"), py::arg("b2"),
      py::arg("cluster") = py::none(), "Data-driven bandwidth selection (location path)");

  m.def(
      "estimate_dist",
      [](const py::array& y, const py::array_t<double>& d, const py::object& b1,
         const py::object& b2, const py::object& cluster, const py::object& aate_w,
         const py::kwargs& kw) {
        EstimationConfig cfg = config_from_kwargs(kw);
        DistanceMatrix dist = make_dist(d);
        std::optional<CutoffGrid> grid;
        if (!b1.is_none() && !b2.is_none()) grid = make_grid(b1, b2);
        std::optional<std::vector<int>> cl;
        if (!cluster.is_none()) {
          std::vector<int> ids;
          for (double v : to_vec(cluster)) ids.push_back(static_cast<int>(v));
          cl = std::move(ids);
        }
        std::vector<double> yy = to_vec(y);
        DistanceResult res = run_distance_analysis(dist, yy, grid, cl, cfg, weights_opt(aate_w),
                                                   threads_from_kwargs(kw));
        py::dict out = table_to_dict(res.table);
        out["bandwidths"] = dist_bws_to_dict(res.bws);
        out["report"] = render_report("rd2d estimate-dist", res.table);
        return out;
      },
      py::arg("y"), py::arg("d"), py::arg("b1") = py::none(), py::arg("b2") = py::none(),
      py::arg("cluster") = py::none(), py::arg("aate_weights") = py::none(),
      "Distance-based estimation and inference on a signed distance matrix");

  m.def(
      "build_distances",
      [](const py::array& x1, const py::array& x2, const py::array& t, const py::array& b1,
         const py::array& b2) {
        Dataset data;
        data.x1 = to_vec(x1);
        data.x2 = to_vec(x2);
        for (double v : to_vec(t)) data.t.push_back(v != 0.0 ? 1 : 0);
        data.y.assign(data.x1.size(), 0.0);
        DistanceMatrix dist = build_distances(data, make_grid(b1, b2));
        py::array_t<double> out({static_cast<py::ssize_t>(dist.n),
                                 static_cast<py::ssize_t>(dist.j_count)});
        for (std::size_t i = 0; i < dist.n; ++i)
          for (std::size_t j = 0; j < dist.j_count; ++j)
            out.mutable_at(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) =
                dist.at(i, j);
        return out;
      },
      py::arg("x1"), py::arg("x2"), py::arg("t"), py::arg("b1"), py::arg("b2"),
      "Signed Euclidean distances to every grid point");

  m.def(
      "bandwidths_dist",
      [](const py::array& y, const py::array_t<double>& d, const py::kwargs& kw) {
        EstimationConfig cfg = config_from_kwargs(kw);
        DistanceMatrix dist = make_dist(d);
        std::vector<double> yy = to_vec(y);
        return dist_bws_to_dict(rot_bandwidth_dist(dist, yy, cfg, threads_from_kwargs(kw)));
      },
      py::arg("y"), py::arg("d"), "Distance-path rule-of-thumb bandwidth selection");

  m.def(
      "run_mc",
      [](int dgp, std::size_t n, int m_reps, const std::string& method, std::uint64_t seed,
         bool full_grid, const py::kwargs& kw) {
        EstimationConfig cfg = config_from_kwargs(kw);
        cfg.seed = seed;
        DGPSpec spec = DGPSpec::dgp(dgp, n, seed);
        CutoffGrid grid = full_grid ? boundary_grid_full() : boundary_grid_reported();
        MCReport rep = run_mc(spec, grid, cfg, mc_method_from_string(method), m_reps,
                              threads_from_kwargs(kw));
        py::dict out;
        std::vector<double> h, bias, sd, rmse, ec, il;
        std::vector<std::string> index;
        for (const auto& r : rep.rows) {
          index.push_back(r.index);
          h.push_back(r.h_mean);
          bias.push_back(r.bias);
          sd.push_back(r.sd);
          rmse.push_back(r.rmse);
          ec.push_back(r.ec);
          il.push_back(r.il);
        }
        out["index"] = index;
        out["h"] = to_array(h);
        out["bias"] = to_array(bias);
        out["sd"] = to_array(sd);
        out["rmse"] = to_array(rmse);
        out["ec"] = to_array(ec);
        out["il"] = to_array(il);
        out["uniform_ec"] = rep.uniform_ec;
        out["uniform_il"] = rep.uniform_il;
        out["failures"] = rep.failures;
        out["text"] = render_mc_report(rep);
        return out;
      },
      py::arg("dgp"), py::arg("n"), py::arg("m"), py::arg("method") = "loc",
      py::arg("seed") = 42, py::arg("full_grid") = false,
      "Monte Carlo coverage study on the built-in grid");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
