#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rd2d/distance.hpp"
#include "rd2d/types.hpp"

namespace rd2d {

/// Optional 1-based id filter for report bodies; out-of-range ids are
/// rejected.
using Subset = std::optional<std::vector<int>>;

/// Listing-style text report: header block plus one body row per cutoff with
/// estimate, z, p-value, and the pointwise interval (or the uniform band when
/// cb_uniform is set). Numbers use fixed 4-decimal formatting; the output is
/// byte-deterministic for identical results.
std::string render_report(const std::string& title, const InferenceTable& table,
                          bool cb_uniform = false, const Subset& subset = {});

/// Bandwidth-only report for the location path (ID, b1, b2, h01..h12), with
/// a Standardization header line.
std::string render_bandwidth_report(const std::string& title, const InferenceTable& table,
                                    const BandwidthSet& bws, const CutoffGrid& grid,
                                    const Subset& subset = {});

/// Estimate-path bandwidth block (adds effective sample sizes per group).
std::string render_bw_block(const std::string& title, const InferenceTable& table,
                            const BandwidthSet& bws, const CutoffGrid& grid,
                            const Subset& subset = {});

/// Distance-path bandwidth report (ID, [b1, b2,] h0, h1).
std::string render_bandwidth_report_dist(const std::string& title, const InferenceTable& table,
                                         const DistBandwidthSet& bws,
                                         const std::optional<CutoffGrid>& grid,
                                         const Subset& subset = {});

/// Machine-readable outputs (full double precision).
void write_results_csv(const std::string& path, const InferenceTable& table);
std::string results_json(const InferenceTable& table);
void write_bandwidths_csv(const std::string& path, const BandwidthSet& bws,
                          const CutoffGrid& grid);
void write_bandwidths_csv_dist(const std::string& path, const DistBandwidthSet& bws,
                               const std::optional<CutoffGrid>& grid);

/// Tidy plot-data exports: long-format (id, b1, b2, series, value) tables.
void export_curve_csv(const std::string& path, const InferenceTable& table);
void export_estimate_heatmap_csv(const std::string& path, const InferenceTable& table);
/// p-value heatmap with bucket labels over {0.001, 0.01, 0.05, 0.1}.
void export_pvalue_heatmap_csv(const std::string& path, const InferenceTable& table);
void export_scatter_csv(const std::string& path, const Dataset& data);

const char* pvalue_bucket(double p);

}  // namespace rd2d
