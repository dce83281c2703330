#pragma once

#include <string>
#include <vector>

#include "rd2d/distance.hpp"
#include "rd2d/types.hpp"

namespace rd2d {

/// Full-precision decimal rendering (round-trips finite doubles bit-exactly).
std::string format_full(double v);

/// Data CSV schema: y,x1,x2,t[,cluster]; header row required; t in {0,1};
/// cluster labels are arbitrary strings mapped to dense ids in first-seen
/// order. Parse errors name the row and column.
Dataset load_data_csv(const std::string& path);
void write_data_csv(const std::string& path, const Dataset& data);

/// Grid CSV schema: b1,b2[,label][,kink].
CutoffGrid load_grid_csv(const std::string& path);
void write_grid_csv(const std::string& path, const CutoffGrid& grid);

/// Signed distance CSV: one header line of cutoff labels, then n rows by J
/// columns.
DistanceMatrix load_distance_csv(const std::string& path);
void write_distance_csv(const std::string& path, const DistanceMatrix& dist);

/// Single-column weights CSV (header line, one weight per cutoff).
std::vector<double> load_weights_csv(const std::string& path);

/// Flat key=value configuration file; '#' comments and blank lines ignored.
/// Returns the pairs in file order; unknown keys are the caller's concern.
std::vector<std::pair<std::string, std::string>> load_config_file(const std::string& path);

}  // namespace rd2d
