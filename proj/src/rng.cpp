#include "rd2d/rng.hpp"

#include <cmath>
#include <limits>

#include "rd2d/types.hpp"

namespace rd2d {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;

double icdf_initial_guess(double p) {
  // Acklam's rational approximation (~1.1e-9 relative error).
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    double u = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  if (p > 1.0 - p_low) {
    double u = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
           ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
  }
  double u = p - 0.5;
  double r = u * u;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_pvalue_two_sided(double z) {
  if (!std::isfinite(z)) return std::isnan(z) ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  return std::erfc(std::fabs(z) / kSqrt2);
}

double normal_icdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ValidationError("normal_icdf: probability outside [0,1]");
  }
  double x = icdf_initial_guess(p);
  // Two Halley refinements against erfc bring the guess to ~1e-16.
  for (int it = 0; it < 2; ++it) {
    double e = normal_cdf(x) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double beta34_icdf(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("beta34_icdf: probability outside [0,1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  auto cdf = [](double x) { return ((((-10.0 * x + 36.0) * x - 45.0) * x + 20.0) * x * x * x); };
  auto pdf = [](double x) {
    double om = 1.0 - x;
    return 60.0 * x * x * om * om * om;
  };
  double lo = 0.0, hi = 1.0;
  double x = 0.42;  // near the median
  for (int it = 0; it < 200; ++it) {
    double f = cdf(x) - p;
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    double g = pdf(x);
    double step = (g > 0.0) ? f / g : 0.0;
    double next = x - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
    if (std::fabs(next - x) < 1e-16 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const {
  std::uint64_t base = mix64(seed_ ^ (stream * 0xD1B54A32D192ED03ULL) ^ 0x8BB84B93962EACC9ULL);
  return mix64(base + (counter + 1) * kGolden);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const {
  // 53 random bits into (0,1), offset so 0 is never produced.
  return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t counter) const {
  return normal_icdf(uniform(stream, counter));
}

std::uint64_t CounterRng::derive(std::uint64_t seed, std::uint64_t salt) {
  return mix64(mix64(seed ^ 0xA0761D6478BD642FULL) + salt * kGolden);
}

}  // namespace rd2d
