#pragma once

#include <vector>

namespace rd2d {

struct MultiIndex {
  int k1 = 0;
  int k2 = 0;
  int order() const { return k1 + k2; }
};

/// Bivariate multi-indices |k| <= p in the fixed basis order: degree blocks
/// d = 0..p, each block listing the pure powers (d,0), (0,d) first and the
/// mixed terms (d-1,1), ..., (1,d-1) by decreasing first exponent. For p <= 2
/// this reproduces (1, u1, u2, u1^2, u2^2, u1*u2) exactly. Derivative
/// selection depends on these positions, so the order is part of the
/// external contract.
class MultiIndexSet {
 public:
  explicit MultiIndexSet(int p);

  int order() const { return p_; }
  int dim() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& at(int pos) const { return indices_[static_cast<std::size_t>(pos)]; }
  /// Position of the monomial u1^k1 u2^k2, or -1 when k1+k2 > p.
  int position(int k1, int k2) const;

  static int dimension(int p) { return (p + 1) * (p + 2) / 2; }
  /// All multi-indices of exact order d, in block order.
  static std::vector<MultiIndex> exact_order(int d);

 private:
  int p_;
  std::vector<MultiIndex> indices_;
};

/// k! = k1! * k2!
double multi_factorial(const MultiIndex& k);

}  // namespace rd2d
