#include "rd2d/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace rd2d {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

struct CsvFile {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  CsvFile csv;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty file: " + path);
  csv.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    csv.rows.push_back(split_csv_line(line));
  }
  return csv;
}

int find_column(const CsvFile& csv, const std::string& name, bool required,
                const std::string& path) {
  auto it = std::find(csv.header.begin(), csv.header.end(), name);
  if (it == csv.header.end()) {
    if (required) throw ValidationError("missing column '" + name + "' in " + path);
    return -1;
  }
  return static_cast<int>(std::distance(csv.header.begin(), it));
}

double parse_double(const std::string& cell, std::size_t row, const std::string& col,
                    const std::string& path) {
  const char* start = cell.c_str();
  char* end = nullptr;
  double v = std::strtod(start, &end);
  if (cell.empty() || end != start + cell.size())
    throw ValidationError("non-numeric cell '" + cell + "' at row " + std::to_string(row + 1) +
                          ", column '" + col + "' in " + path);
  return v;
}

const std::string& cell_at(const std::vector<std::string>& row, int col, std::size_t row_idx,
                           const std::string& path) {
  if (col < 0 || static_cast<std::size_t>(col) >= row.size())
    throw ValidationError("short row " + std::to_string(row_idx + 1) + " in " + path);
  return row[static_cast<std::size_t>(col)];
}

}  // namespace

Dataset load_data_csv(const std::string& path) {
  CsvFile csv = read_csv(path);
  int cy = find_column(csv, "y", true, path);
  int cx1 = find_column(csv, "x1", true, path);
  int cx2 = find_column(csv, "x2", true, path);
  int ct = find_column(csv, "t", true, path);
  int cc = find_column(csv, "cluster", false, path);

  Dataset data;
  data.y.reserve(csv.rows.size());
  std::map<std::string, int> cluster_ids;
  std::vector<int> cluster;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    data.y.push_back(parse_double(cell_at(row, cy, r, path), r, "y", path));
    data.x1.push_back(parse_double(cell_at(row, cx1, r, path), r, "x1", path));
    data.x2.push_back(parse_double(cell_at(row, cx2, r, path), r, "x2", path));
    double t = parse_double(cell_at(row, ct, r, path), r, "t", path);
    if (t != 0.0 && t != 1.0)
      throw ValidationError("treatment indicator not in {0,1} at row " + std::to_string(r + 1) +
                            " in " + path);
    data.t.push_back(static_cast<std::uint8_t>(t));
    if (cc >= 0) {
      const std::string& label = cell_at(row, cc, r, path);
      auto [it, fresh] = cluster_ids.try_emplace(label, static_cast<int>(cluster_ids.size()));
      cluster.push_back(it->second);
    }
  }
  if (cc >= 0) data.cluster = std::move(cluster);
  return data;
}

void write_data_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << "y,x1,x2,t" << (data.cluster ? ",cluster" : "") << "\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    out << format_full(data.y[i]) << ',' << format_full(data.x1[i]) << ','
        << format_full(data.x2[i]) << ',' << int(data.t[i]);
    if (data.cluster) out << ',' << (*data.cluster)[i];
    out << '\n';
  }
}

CutoffGrid load_grid_csv(const std::string& path) {
  CsvFile csv = read_csv(path);
  int cb1 = find_column(csv, "b1", true, path);
  int cb2 = find_column(csv, "b2", true, path);
  int cl = find_column(csv, "label", false, path);
  int ck = find_column(csv, "kink", false, path);
  CutoffGrid grid;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    grid.b1.push_back(parse_double(cell_at(row, cb1, r, path), r, "b1", path));
    grid.b2.push_back(parse_double(cell_at(row, cb2, r, path), r, "b2", path));
    if (cl >= 0) grid.labels.push_back(cell_at(row, cl, r, path));
    if (ck >= 0)
      grid.kink_flags.push_back(
          parse_double(cell_at(row, ck, r, path), r, "kink", path) != 0.0 ? 1 : 0);
  }
  return grid;
}

void write_grid_csv(const std::string& path, const CutoffGrid& grid) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  bool labels = !grid.labels.empty();
  bool kinks = !grid.kink_flags.empty();
  out << "b1,b2" << (labels ? ",label" : "") << (kinks ? ",kink" : "") << "\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out << format_full(grid.b1[j]) << ',' << format_full(grid.b2[j]);
    if (labels) out << ',' << grid.labels[j];
    if (kinks) out << ',' << int(grid.kink_flags[j]);
    out << '\n';
  }
}

DistanceMatrix load_distance_csv(const std::string& path) {
  CsvFile csv = read_csv(path);
  DistanceMatrix dist;
  dist.labels = csv.header;
  dist.j_count = csv.header.size();
  dist.n = csv.rows.size();
  if (dist.j_count == 0) throw ValidationError("no cutoff columns in " + path);
  dist.values.resize(dist.n * dist.j_count);
  for (std::size_t r = 0; r < dist.n; ++r) {
    const auto& row = csv.rows[r];
    if (row.size() != dist.j_count)
      throw ValidationError("short row " + std::to_string(r + 1) + " in " + path);
    for (std::size_t j = 0; j < dist.j_count; ++j)
      dist.values[j * dist.n + r] = parse_double(row[j], r, csv.header[j], path);
  }
  return dist;
}

void write_distance_csv(const std::string& path, const DistanceMatrix& dist) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (std::size_t j = 0; j < dist.j_count; ++j)
    out << (j ? "," : "") << (j < dist.labels.size() ? dist.labels[j] : "b" + std::to_string(j + 1));
  out << '\n';
  for (std::size_t i = 0; i < dist.n; ++i) {
    for (std::size_t j = 0; j < dist.j_count; ++j)
      out << (j ? "," : "") << format_full(dist.at(i, j));
    out << '\n';
  }
}

std::vector<double> load_weights_csv(const std::string& path) {
  CsvFile csv = read_csv(path);
  std::vector<double> w;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    if (csv.rows[r].empty()) continue;
    w.push_back(parse_double(csv.rows[r][0], r, csv.header.empty() ? "w" : csv.header[0], path));
  }
  return w;
}

std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ValidationError("malformed config line " + std::to_string(lineno) + " in " + path +
                            " (expected key=value)");
    pairs.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return pairs;
}

}  // namespace rd2d
