#pragma once

#include <cmath>
#include <vector>

namespace gkbm {

/// Point on the unit torus S = (-1/2, 1/2].
struct TorusPoint {
  double coordinate{0.0};

  /// Normalizes an arbitrary real into (-1/2, 1/2]. Uses round-half-to-even
  /// remapping so results are reproducible bit-for-bit.
  static TorusPoint from(double raw) {
    double x = raw - std::nearbyint(raw);
    if (x <= -0.5) x += 1.0;
    return TorusPoint{x};
  }
};

/// d(x, y) = min(|x - y|, 1 - |x - y|), in [0, 1/2].
inline double torus_distance(TorusPoint x, TorusPoint y) {
  double d = std::fabs(x.coordinate - y.coordinate);
  return d <= 0.5 ? d : 1.0 - d;
}

/// Partition of the torus into blocks of width kappa * log(n) / n. Block i
/// covers [i*w, (i+1)*w) on the shifted circle [0, 1); the last block may be
/// narrower. Blocks are indexed cyclically starting from 0.
class BlockPartition {
 public:
  /// Requires n >= 3, kappa > 0 and kappa*log(n)/n < 1/2; throws otherwise.
  static BlockPartition build(int n, double kappa);

  int n() const { return n_; }
  double kappa() const { return kappa_; }
  double block_width() const { return width_; }
  int block_count() const { return count_; }

  /// 0-based index of the block containing the point.
  int block_of(TorusPoint point) const;

  double left_of(int block) const { return width_ * block; }
  double width_of(int block) const {
    return block + 1 == count_ ? 1.0 - width_ * block : width_;
  }

  /// Cyclic index gap min(|i-j|, count - |i-j|).
  int cyclic_gap(int i, int j) const;

  /// Minimum torus distance between the closures of two blocks.
  double min_block_distance(int i, int j) const;

  /// Blocks whose minimum distance to block i is strictly below the kernel
  /// support radius kappa*log(n)/n (the full block width). This is block i,
  /// its two cyclic neighbours, and additionally the pair straddling the
  /// last block whenever that block is narrower than the support: the pair
  /// (count-2, 0) can then hold points closer than the support even though
  /// its index gap is 2. Pairs separated by exactly one full-width block
  /// touch the support only on a measure-zero boundary and are excluded.
  /// Sorted ascending.
  const std::vector<int>& reachable_blocks(int i) const {
    return reachable_[i];
  }

 private:
  BlockPartition() = default;

  int n_{0};
  double kappa_{0.0};
  double width_{0.0};
  int count_{0};
  std::vector<std::vector<int>> reachable_;
};

}  // namespace gkbm
