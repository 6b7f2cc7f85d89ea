#include "gkbm/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gkbm {

BlockPartition BlockPartition::build(int n, double kappa) {
  if (n < 3) throw std::invalid_argument("BlockPartition: n must be >= 3");
  if (!(kappa > 0.0)) throw std::invalid_argument("BlockPartition: kappa must be > 0");
  const double width = kappa * std::log(static_cast<double>(n)) / n;
  if (!(width < 0.5)) {
    throw std::invalid_argument(
        "BlockPartition: block width kappa*log(n)/n = " + std::to_string(width) +
        " >= 1/2; geometry is no longer local");
  }

  BlockPartition part;
  part.n_ = n;
  part.kappa_ = kappa;
  part.width_ = width;
  part.count_ = static_cast<int>(std::ceil(1.0 / width));

  const int b = part.count_;
  part.reachable_.resize(b);
  // Strictly below the support radius: a gap-2 pair separated by one full
  // block touches the support only at a measure-zero boundary (distance
  // exactly kappa log n / n), so it is excluded; the pair straddling a
  // narrow last block is genuinely closer and stays in.
  const double support = width * (1.0 - 1e-12);
  for (int i = 0; i < b; ++i) {
    std::vector<int>& reach = part.reachable_[i];
    if (b <= 5) {
      for (int j = 0; j < b; ++j)
        if (part.min_block_distance(i, j) < support) reach.push_back(j);
    } else {
      for (int off = -2; off <= 2; ++off) {
        int j = ((i + off) % b + b) % b;
        if (part.min_block_distance(i, j) < support) reach.push_back(j);
      }
      std::sort(reach.begin(), reach.end());
      reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
    }
  }
  return part;
}

int BlockPartition::block_of(TorusPoint point) const {
  double shifted = point.coordinate;
  if (shifted < 0.0) shifted += 1.0;  // (-1/2, 1/2] -> [0, 1)
  int idx = static_cast<int>(shifted / width_);
  if (idx >= count_) idx = count_ - 1;
  if (idx < 0) idx = 0;
  return idx;
}

int BlockPartition::cyclic_gap(int i, int j) const {
  int g = std::abs(i - j);
  return std::min(g, count_ - g);
}

double BlockPartition::min_block_distance(int i, int j) const {
  if (i == j) return 0.0;
  const double li = left_of(i), ri = li + width_of(i);
  const double lj = left_of(j), rj = lj + width_of(j);
  // Forward gap on the circle, in [0, 1). Boundaries are multiples of the
  // block width, which is not exactly representable, so touching blocks can
  // produce a gap of minus a few ulps; that means 0, not a wraparound.
  auto forward = [](double g) {
    if (g < 0.0) {
      if (g > -1e-12) return 0.0;
      g += 1.0;
    }
    return g;
  };
  return std::min(forward(lj - ri), forward(li - rj));
}

}  // namespace gkbm
