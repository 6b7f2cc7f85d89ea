#pragma once

#include <cstdint>
#include <vector>

#include "gkbm/geometry.hpp"
#include "gkbm/kernel.hpp"
#include "gkbm/rng.hpp"

namespace gkbm {

struct GkbmParams {
  double lambda{1.0};
  int n{1000};
  double p{0.5};
  double q{0.5};
  Kernel kernel{Kernel::indicator(1.0)};
  std::uint64_t seed{0};

  /// lambda > 0, n >= 3, p,q in [0,1], block width < 1/2. Throws otherwise.
  void validate() const;
};

/// Node labels in {-1, 0, +1}; 0 means unassigned/ignored.
struct Labeling {
  std::vector<std::int8_t> values;

  Labeling() = default;
  explicit Labeling(std::size_t n) : values(n, 0) {}
  std::size_t size() const { return values.size(); }
  std::int8_t& operator[](std::size_t i) { return values[i]; }
  std::int8_t operator[](std::size_t i) const { return values[i]; }
};

struct AgreementResult {
  int flip{+1};             // global sign maximizing matches
  std::int64_t matched{0};  // matches under that sign
  std::int64_t compared{0}; // positions where both labels are nonzero
};

/// Flip-aware comparison over positions where both labelings are nonzero.
/// Ties between the two signs resolve to flip = +1.
AgreementResult agreement(const Labeling& a, const Labeling& b);

/// One sampled GKBM triple plus index structures. Immutable after creation;
/// safe to share across threads.
struct GkbmInstance {
  GkbmParams params;
  int node_count{0};
  std::vector<TorusPoint> locations;
  std::vector<std::int8_t> communities;         // ground truth, +-1
  std::vector<std::vector<std::int32_t>> neighbors;  // sorted adjacency lists
  BlockPartition partition{BlockPartition::build(3, 0.1)};
  std::vector<std::int32_t> node_block;
  std::vector<std::vector<std::int32_t>> block_nodes;

  std::size_t edge_count() const;
  bool has_edge(int u, int v) const;
  double psi(int u, int v) const;
  double support_radius() const { return partition.block_width(); }

  /// Rebuilds partition buckets and sorts adjacency (after deserialization).
  void rebuild_index();

  /// Visits every candidate partner v != u (nodes in blocks within kernel
  /// reach of u's block) with psi_n(u, v) > 0. f(v, psi).
  template <class F>
  void for_each_candidate(int u, F&& f) const {
    for (int b : partition.reachable_blocks(node_block[u])) {
      for (std::int32_t v : block_nodes[b]) {
        if (v == u) continue;
        const double val = psi(u, v);
        if (val > 0.0) f(v, val);
      }
    }
  }

  /// Visits every unordered candidate pair (u < v by construction within a
  /// block pair) once. f(u, v, psi) for pairs with psi > 0.
  template <class F>
  void for_each_candidate_pair(F&& f) const {
    const int b = partition.block_count();
    for (int i = 0; i < b; ++i) {
      for (int j : partition.reachable_blocks(i)) {
        if (j < i) continue;
        if (i == j) {
          const auto& nodes = block_nodes[i];
          for (std::size_t a = 0; a < nodes.size(); ++a) {
            for (std::size_t c = a + 1; c < nodes.size(); ++c) {
              const double val = psi(nodes[a], nodes[c]);
              if (val > 0.0) f(nodes[a], nodes[c], val);
            }
          }
        } else {
          for (std::int32_t u : block_nodes[i]) {
            for (std::int32_t v : block_nodes[j]) {
              const double val = psi(u, v);
              if (val > 0.0) f(u, v, val);
            }
          }
        }
      }
    }
  }
};

/// Samples a GKBM(lambda*n, p, q, phi) instance. N ~ Poisson(lambda*n),
/// locations and communities i.i.d. uniform, edges Bernoulli((p or q)*psi_n)
/// over candidate pairs enumerated via the block partition (never all N^2
/// pairs). Deterministic per seed: one RNG substream for N, one for
/// locations, one for communities, one per block pair for edges.
GkbmInstance sample(const GkbmParams& params);

/// Same, with one deterministic extra node at index 0 (Slivnyak insertion:
/// conditioning on "a node at the origin" for the Palm-style experiments).
GkbmInstance sample_with_anchor(const GkbmParams& params, TorusPoint anchor,
                                int anchor_community);

/// p * psi_n if same_community else q * psi_n.
double edge_probability(const GkbmParams& params, TorusPoint x, TorusPoint y,
                        bool same_community);

}  // namespace gkbm
