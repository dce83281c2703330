#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <utility>

#include "rd2d/types.hpp"

namespace rd2d {

/// Canonical pilot constant per kernel, relative to the triangular baseline
/// of 1.0. The values are the equivalent-bandwidth ratios
/// ((R(k)/mu2(k)) / (R(tri)/mu2(tri)))^(1/3) for the density pilot; they are
/// plain data and can be overridden through EstimationConfig::pilot_constant.
double kernel_pilot_constant(Kernel k);

/// Step 1: density-style ROT pilot bandwidth
/// c_hat = C_K * sigma_bar * n^(-1/6), with sigma_bar the geometric mean of
/// the coordinate sample SDs (1 when stdvar is on, since selection then runs
/// on standardized scores).
double pilot_step1(const Dataset& data, const EstimationConfig& cfg);

/// MSE-optimal bandwidth formula for the final selection:
/// h = (c_nu * v / (b2_regularized * n))^(1/(2p+4)) with
/// c_nu = (2+2*nu)/(2p+2-2*nu); nu = 0 reproduces (2V/((2p+2) B^2 n))^(1/(2p+4)).
double mse_bandwidth_formula(double v, double b2_regularized, double n, int p, int deriv_order);

/// Pilot bandwidth formula for estimating the bias linear combination with a
/// q-th order fit: b = ((2p+4) v / (2(q-p) b2 n))^(1/(2q+4)).
double pilot_bandwidth_formula(double v, double b2, double n, int p, int q);

/// Step 2: per-group pilot bandwidths b_hat_t = C_t n^(-1/(2q+4)), one pair
/// for the whole grid. The variance constant comes from an order-q local fit
/// at c_hat; the bias constant from derivatives of a global polynomial of
/// order q+1 fitted on the nearest neighbors of each cutoff within the group
/// (k = max(bwcheck, 5 * dim(q+1))); both are averaged over the grid.
/// Expects data and grid already in selection space.
std::pair<double, double> pilot_step2(const Dataset& data, const CutoffGrid& grid,
                                      const EstimationConfig& cfg, double c_hat);

/// Unweighted group-wide polynomial fit in raw offsets around (x1,x2); the
/// coefficient of the monomial m estimates the derivative mu^(m)/m!. Used
/// for the pilot bias constants; min_points is the well-posedness floor.
Eigen::VectorXd pilot_reference_fit(const Dataset& data, double x1, double x2, int group,
                                    int order, int min_points);

struct BiasVarianceConstants {
  double v_hat = 0.0;     // variance constant V
  double bias = 0.0;      // bias constant B
  double bias_var = 0.0;  // Var[B] used for regularization
};

/// Step 3 constants for one cutoff and group, in selection space: V from the
/// order-p fit at c_hat, B from order-q derivative estimates at b_hat with
/// the order-p Gram/theta matrices at c_hat, Var[B] from the order-q
/// sandwich at b_hat.
BiasVarianceConstants bias_constant(const Dataset& data, const CutoffGrid& grid, std::size_t j,
                                    int group, const EstimationConfig& cfg, double c_hat,
                                    double b_hat);

/// Full data-driven selection (3-step DPI) producing per-cutoff, per-group,
/// per-coordinate bandwidths with guard enforcement and provenance.
BandwidthSet select_bandwidths(const Dataset& data, const CutoffGrid& grid,
                               const EstimationConfig& cfg, int threads = 1);

}  // namespace rd2d
