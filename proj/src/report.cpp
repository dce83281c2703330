#include "rd2d/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rd2d/io.hpp"

namespace rd2d {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string fmt_int(const char* spec, long v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string label_line(const std::string& label, const std::string& value) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-23s%s", label.c_str(), value.c_str());
  return std::string(buf) + "\n";
}

std::string two_col_line(const std::string& label, const std::string& a, const std::string& b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-23s%-13s%-13s", label.c_str(), a.c_str(), b.c_str());
  return std::string(buf) + "\n";
}

std::string header_block(const std::string& title, const InferenceTable& t, bool with_q,
                         bool with_std_line, bool standardized) {
  const TableMeta& m = t.meta;
  std::ostringstream os;
  os << title << "\n\n";
  os << label_line("Number of Obs.", std::to_string(m.n));
  os << label_line("BW type.", m.bw_label);
  os << label_line("Kernel", m.kernel_label);
  if (!m.kink_label.empty()) os << label_line("Kink", m.kink_label);
  os << label_line("VCE method", m.vce_label);
  os << label_line("Masspoints", m.masspoint_label);
  if (with_std_line) os << label_line("Standardization", standardized ? "on" : "off");
  os << "\n";
  os << two_col_line("Number of Obs.", std::to_string(m.n_control), std::to_string(m.n_treated));
  os << two_col_line("Estimand (deriv)", std::to_string(m.deriv.first),
                     std::to_string(m.deriv.second));
  os << two_col_line("Order est. (p)", std::to_string(m.p), std::to_string(m.p));
  if (with_q) os << two_col_line("Order rbc. (q)", std::to_string(m.q), std::to_string(m.q));
  if (m.show_unique)
    os << two_col_line("Unique Obs.", std::to_string(m.unique_control),
                       std::to_string(m.unique_treated));
  os << "\n";
  return os.str();
}

std::vector<std::size_t> resolve_subset(const Subset& subset, std::size_t j_count) {
  std::vector<std::size_t> out;
  if (!subset) {
    for (std::size_t j = 0; j < j_count; ++j) out.push_back(j);
    return out;
  }
  for (int id : *subset) {
    if (id < 1 || static_cast<std::size_t>(id) > j_count)
      throw ValidationError("subset index " + std::to_string(id) + " out of range (1.." +
                            std::to_string(j_count) + ")");
    out.push_back(static_cast<std::size_t>(id - 1));
  }
  return out;
}

std::string rule_line(int width) { return std::string(static_cast<std::size_t>(width), '=') + " \n"; }

std::string level_text(double level) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", level);
  return buf;
}

}  // namespace

std::string render_report(const std::string& title, const InferenceTable& table, bool cb_uniform,
                          const Subset& subset) {
  std::ostringstream os;
  os << header_block(title, table, true, false, false);
  auto rowsel = resolve_subset(subset, table.rows.size());
  os << rule_line(68);
  {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%4s%9s%9s%9s%9s%9s%15s", "ID", "b1", "b2", "Est.", "z",
                  "P>|z|", level_text(table.meta.level).c_str());
    os << buf << " \n";
  }
  os << rule_line(68);
  for (std::size_t j : rowsel) {
    const InferenceRow& r = table.rows[j];
    double lo = cb_uniform ? r.cb_lo : r.ci_lo;
    double hi = cb_uniform ? r.cb_hi : r.ci_hi;
    os << fmt_int("%4ld", r.id);
    if (table.meta.has_coords) {
      os << fmt("%9.3f", r.b1) << fmt("%9.3f", r.b2);
    } else {
      os << std::string(18, ' ');
    }
    os << fmt("%9.4f", r.estimate) << fmt("%9.4f", r.z) << fmt("%9.4f", r.p_value);
    os << "   [" << fmt("%0.4f", lo) << ", " << fmt("%0.4f", hi) << "] \n";
  }
  if (table.aate) {
    const AateRow& a = *table.aate;
    os << std::string(68, '-') << " \n";
    os << "AATE                  ";  // pads to the Est. column
    os << fmt("%9.4f", a.estimate) << fmt("%9.4f", a.z) << fmt("%9.4f", a.p_value);
    os << "   [" << fmt("%0.4f", a.ci_lo) << ", " << fmt("%0.4f", a.ci_hi) << "] \n";
  }
  os << rule_line(68);
  for (const auto& w : table.warnings) os << "Warning: " << w.message << "\n";
  return os.str();
}

std::string render_bandwidth_report(const std::string& title, const InferenceTable& table,
                                    const BandwidthSet& bws, const CutoffGrid& grid,
                                    const Subset& subset) {
  std::ostringstream os;
  InferenceTable t = table;
  t.meta.bw_label = std::string(to_string(bws.selector)) + "-dpi";
  os << header_block(title, t, false, true, bws.standardized);
  auto rowsel = resolve_subset(subset, bws.at.size());
  os << "Bandwidth Selection \n";
  os << rule_line(52);
  os << "      Bdy Points         BW Control     BW Treatment \n";
  os << "  ID      b1      b2     h01     h02     h11     h12 \n";
  os << rule_line(52);
  for (std::size_t j : rowsel) {
    const BandwidthEntry& e = bws.at[j];
    os << fmt_int("%4ld", static_cast<long>(j + 1)) << fmt("%8.3f", grid.b1[j])
       << fmt("%8.3f", grid.b2[j]) << fmt("%8.3f", e.h01) << fmt("%8.3f", e.h02)
       << fmt("%8.3f", e.h11) << fmt("%8.3f", e.h12) << " \n";
  }
  os << rule_line(52);
  return os.str();
}

std::string render_bw_block(const std::string& title, const InferenceTable& table,
                            const BandwidthSet& bws, const CutoffGrid& grid,
                            const Subset& subset) {
  std::ostringstream os;
  os << header_block(title, table, true, false, false);
  auto rowsel = resolve_subset(subset, bws.at.size());
  os << rule_line(68);
  os << "      Bdy Points         BW Control     BW Treatment       Eff. N    \n";
  os << "  ID      b1      b2     h01     h02     h11     h12     Nh0     Nh1 \n";
  os << rule_line(68);
  for (std::size_t j : rowsel) {
    const BandwidthEntry& e = bws.at[j];
    const InferenceRow& r = table.rows[j];
    os << fmt_int("%4ld", static_cast<long>(j + 1)) << fmt("%8.3f", grid.b1[j])
       << fmt("%8.3f", grid.b2[j]) << fmt("%8.3f", e.h01) << fmt("%8.3f", e.h02)
       << fmt("%8.3f", e.h11) << fmt("%8.3f", e.h12) << fmt_int("%8ld", r.n_h0)
       << fmt_int("%8ld", r.n_h1) << " \n";
  }
  os << rule_line(68);
  return os.str();
}

std::string render_bandwidth_report_dist(const std::string& title, const InferenceTable& table,
                                         const DistBandwidthSet& bws,
                                         const std::optional<CutoffGrid>& grid,
                                         const Subset& subset) {
  std::ostringstream os;
  InferenceTable t = table;
  t.meta.bw_label = std::string(to_string(bws.selector)) + "-rot";
  os << header_block(title, t, false, false, false);
  auto rowsel = resolve_subset(subset, bws.at.size());
  os << "Bandwidth Selection \n";
  const bool coords = grid.has_value();
  const int width = coords ? 48 : 32;
  os << rule_line(width);
  if (coords) {
    os << "      Bdy Points        BW Control  BW Treatment \n";
    os << "  ID      b1      b2            h0            h1 \n";
  } else {
    os << "        BW Control  BW Treatment \n";
    os << "  ID            h0            h1 \n";
  }
  os << rule_line(width);
  for (std::size_t j : rowsel) {
    const DistBandwidthEntry& e = bws.at[j];
    os << fmt_int("%4ld", static_cast<long>(j + 1));
    if (coords) os << fmt("%8.3f", grid->b1[j]) << fmt("%8.3f", grid->b2[j]);
    os << fmt("%14.3f", e.h0) << fmt("%14.3f", e.h1) << " \n";
  }
  os << rule_line(width);
  return os.str();
}

void write_results_csv(const std::string& path, const InferenceTable& table) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "id,b1,b2,est,rbc_est,se,se_rbc,z,p,ci_lo,ci_hi,cb_lo,cb_hi,nh0,nh1\n";
  for (const auto& r : table.rows) {
    out << r.id << ',' << format_full(r.b1) << ',' << format_full(r.b2) << ','
        << format_full(r.estimate) << ',' << format_full(r.rbc_estimate) << ','
        << format_full(r.se) << ',' << format_full(r.se_rbc) << ',' << format_full(r.z) << ','
        << format_full(r.p_value) << ',' << format_full(r.ci_lo) << ',' << format_full(r.ci_hi)
        << ',' << format_full(r.cb_lo) << ',' << format_full(r.cb_hi) << ',' << r.n_h0 << ','
        << r.n_h1 << '\n';
  }
}

std::string results_json(const InferenceTable& table) {
  nlohmann::json j;
  const TableMeta& m = table.meta;
  j["meta"] = {{"n", m.n},
               {"n_control", m.n_control},
               {"n_treated", m.n_treated},
               {"unique_control", m.unique_control},
               {"unique_treated", m.unique_treated},
               {"bw_type", m.bw_label},
               {"kernel", m.kernel_label},
               {"vce", m.vce_label},
               {"masspoints", m.masspoint_label},
               {"kink", m.kink_label},
               {"p", m.p},
               {"q", m.q},
               {"deriv", {m.deriv.first, m.deriv.second}},
               {"level", m.level}};
  j["band"] = {{"alpha", table.band.alpha},
               {"q_alpha", table.band.q_alpha},
               {"draws", table.band.draws},
               {"seed", table.band.seed},
               {"floored", table.band.floored}};
  j["rows"] = nlohmann::json::array();
  for (const auto& r : table.rows) {
    j["rows"].push_back({{"id", r.id},
                         {"b1", r.b1},
                         {"b2", r.b2},
                         {"est", r.estimate},
                         {"rbc_est", r.rbc_estimate},
                         {"se", r.se},
                         {"se_rbc", r.se_rbc},
                         {"z", r.z},
                         {"p", r.p_value},
                         {"ci_lo", r.ci_lo},
                         {"ci_hi", r.ci_hi},
                         {"cb_lo", r.cb_lo},
                         {"cb_hi", r.cb_hi},
                         {"nh0", r.n_h0},
                         {"nh1", r.n_h1}});
  }
  if (table.aate) {
    const AateRow& a = *table.aate;
    j["aate"] = {{"est", a.estimate}, {"rbc_est", a.rbc_estimate}, {"se", a.se},
                 {"z", a.z},          {"p", a.p_value},            {"ci_lo", a.ci_lo},
                 {"ci_hi", a.ci_hi}};
  }
  j["warnings"] = nlohmann::json::array();
  for (const auto& w : table.warnings) j["warnings"].push_back({{"code", w.code}, {"message", w.message}});
  return j.dump(2);
}

void write_bandwidths_csv(const std::string& path, const BandwidthSet& bws,
                          const CutoffGrid& grid) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "id,b1,b2,h01,h02,h11,h12,adjusted,rule\n";
  for (std::size_t j = 0; j < bws.at.size(); ++j) {
    const BandwidthEntry& e = bws.at[j];
    out << j + 1 << ',' << format_full(grid.b1[j]) << ',' << format_full(grid.b2[j]) << ','
        << format_full(e.h01) << ',' << format_full(e.h02) << ',' << format_full(e.h11) << ','
        << format_full(e.h12) << ',' << (e.adjusted_control || e.adjusted_treated ? 1 : 0) << ','
        << e.guard_rule << '\n';
  }
}

void write_bandwidths_csv_dist(const std::string& path, const DistBandwidthSet& bws,
                               const std::optional<CutoffGrid>& grid) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "id,b1,b2,h0,h1,h0_inf,h1_inf,adjusted,rule\n";
  for (std::size_t j = 0; j < bws.at.size(); ++j) {
    const DistBandwidthEntry& e = bws.at[j];
    out << j + 1 << ',' << (grid ? format_full(grid->b1[j]) : "") << ','
        << (grid ? format_full(grid->b2[j]) : "") << ',' << format_full(e.h0) << ','
        << format_full(e.h1) << ',' << format_full(e.h0_inf) << ',' << format_full(e.h1_inf)
        << ',' << (e.adjusted_control || e.adjusted_treated ? 1 : 0) << ',' << e.guard_rule
        << '\n';
  }
}

namespace {

void export_long(const std::string& path, const InferenceTable& table,
                 const std::vector<std::pair<const char*, double InferenceRow::*>>& series) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "id,b1,b2,series,value\n";
  for (const auto& [name, member] : series)
    for (const auto& r : table.rows)
      out << r.id << ',' << format_full(r.b1) << ',' << format_full(r.b2) << ',' << name << ','
          << format_full(r.*member) << '\n';
}

}  // namespace

void export_curve_csv(const std::string& path, const InferenceTable& table) {
  export_long(path, table,
              {{"est", &InferenceRow::estimate},
               {"rbc_est", &InferenceRow::rbc_estimate},
               {"ci_lo", &InferenceRow::ci_lo},
               {"ci_hi", &InferenceRow::ci_hi},
               {"cb_lo", &InferenceRow::cb_lo},
               {"cb_hi", &InferenceRow::cb_hi}});
}

void export_estimate_heatmap_csv(const std::string& path, const InferenceTable& table) {
  export_long(path, table, {{"est", &InferenceRow::estimate}});
}

const char* pvalue_bucket(double p) {
  if (p < 0.001) return "<0.001";
  if (p < 0.01) return "0.001-0.01";
  if (p < 0.05) return "0.01-0.05";
  if (p < 0.1) return "0.05-0.1";
  return ">=0.1";
}

void export_pvalue_heatmap_csv(const std::string& path, const InferenceTable& table) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "id,b1,b2,series,value,bucket\n";
  for (const auto& r : table.rows)
    out << r.id << ',' << format_full(r.b1) << ',' << format_full(r.b2) << ",pvalue,"
        << format_full(r.p_value) << ',' << pvalue_bucket(r.p_value) << '\n';
}

void export_scatter_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "unit,x1,x2,t,y\n";
  for (std::size_t i = 0; i < data.n(); ++i)
    out << i + 1 << ',' << format_full(data.x1[i]) << ',' << format_full(data.x2[i]) << ','
        << int(data.t[i]) << ',' << format_full(data.y[i]) << '\n';
}

}  // namespace rd2d
