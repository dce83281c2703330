#pragma once

// Test-side reference implementations, deliberately independent of the
// library's estimation path: raw-offset normal equations assembled by triple
// loops and solved with hand-rolled Gaussian elimination, naive sandwich
// sums, and a separate random number generator.

#include <cstdint>
#include <vector>

#include "rd2d/multi_index.hpp"
#include "rd2d/types.hpp"

namespace oracle {

// xorshift + Box-Muller, unrelated to the library generator.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ? seed : 1) {}
  std::uint64_t next();
  double unif();    // (0,1)
  double normal();  // standard normal
};

std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b);

double kernel1d(rd2d::Kernel k, double v);
double weight_biv(double u1, double u2, double h1, double h2, rd2d::Kernel k, rd2d::KernelType t);
double weight_dist(double d, double h, rd2d::Kernel k);

struct RawFit {
  std::vector<double> beta;       // raw-offset coefficients, basis order
  std::vector<double> fitted;     // value of the fit at the cutoff = beta[0]
  std::vector<double> residuals;  // per in-kernel unit
  std::vector<double> weights;
  std::vector<long> idx;
};

// Bivariate WLS on raw offsets (X - x), kernel-localized, group-restricted.
RawFit fit_biv_raw(const rd2d::Dataset& data, double x1, double x2, int group, double h1,
                   double h2, int p, rd2d::Kernel k, rd2d::KernelType kt);

// Univariate WLS on a signed distance column; side 1 fits d >= 0.
RawFit fit_dist_raw(const std::vector<double>& d, const std::vector<double>& y, int side,
                    double h, int p, rd2d::Kernel k);

// Naive gram / theta / hc0-meat assemblies on scaled offsets.
std::vector<std::vector<double>> gram_naive(const rd2d::Dataset& data, double x1, double x2,
                                            int group, double h1, double h2, int p,
                                            rd2d::Kernel k, rd2d::KernelType kt);
std::vector<double> theta_naive(const rd2d::Dataset& data, double x1, double x2, int group,
                                double h1, double h2, int p, rd2d::Kernel k, rd2d::KernelType kt,
                                rd2d::MultiIndex kk);
std::vector<std::vector<double>> meat_hc0_naive(const rd2d::Dataset& data, double x1, double x2,
                                                int group, double h1, double h2, int p,
                                                rd2d::Kernel k, rd2d::KernelType kt,
                                                const std::vector<double>& residuals_by_row);

// Random test dataset: scores uniform on [-1,1]^2, treatment on x1 >= 0,
// outcome polynomial plus optional Gaussian noise.
rd2d::Dataset random_dataset(std::size_t n, std::uint64_t seed, double noise = 1.0);

}  // namespace oracle
