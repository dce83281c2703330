#pragma once

#include <cstdint>

namespace rd2d {

/// Standard normal quantile function, accurate to ~1e-15 over (0,1).
double normal_icdf(double prob);

/// Standard normal CDF.
double normal_cdf(double x);

/// Two-sided normal p-value for a statistic z.
double normal_pvalue_two_sided(double z);

/// Quantile of Beta(3,4) via safeguarded Newton on the closed-form CDF
/// F(x) = 20x^3 - 45x^4 + 36x^5 - 10x^6.
double beta34_icdf(double prob);

/// Counter-based generator: every variate is a pure function of
/// (seed, stream, counter), so serial and parallel evaluation orders produce
/// identical streams.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;
  /// Uniform variate strictly inside (0,1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const;
  double normal(std::uint64_t stream, std::uint64_t counter) const;

  std::uint64_t seed() const { return seed_; }

  /// Deterministic sub-seed derivation (per replication, per draw block).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t salt);

 private:
  std::uint64_t seed_ = 0;
};

}  // namespace rd2d
