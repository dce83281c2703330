#include "rd2d/multi_index.hpp"

#include "rd2d/types.hpp"

namespace rd2d {

std::vector<MultiIndex> MultiIndexSet::exact_order(int d) {
  std::vector<MultiIndex> block;
  if (d == 0) {
    block.push_back({0, 0});
    return block;
  }
  block.push_back({d, 0});
  block.push_back({0, d});
  for (int k1 = d - 1; k1 >= 1; --k1) block.push_back({k1, d - k1});
  return block;
}

MultiIndexSet::MultiIndexSet(int p) : p_(p) {
  if (p < 0) throw ValidationError("polynomial order must be >= 0");
  if (p > 15) throw ValidationError("polynomial order above 15 is not supported");
  indices_.reserve(static_cast<std::size_t>(dimension(p)));
  for (int d = 0; d <= p; ++d) {
    auto block = exact_order(d);
    indices_.insert(indices_.end(), block.begin(), block.end());
  }
}

int MultiIndexSet::position(int k1, int k2) const {
  for (int i = 0; i < dim(); ++i)
    if (indices_[static_cast<std::size_t>(i)].k1 == k1 &&
        indices_[static_cast<std::size_t>(i)].k2 == k2)
      return i;
  return -1;
}

double multi_factorial(const MultiIndex& k) {
  double f = 1.0;
  for (int i = 2; i <= k.k1; ++i) f *= i;
  for (int i = 2; i <= k.k2; ++i) f *= i;
  return f;
}

}  // namespace rd2d
