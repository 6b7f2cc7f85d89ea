#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "gkbm/model.hpp"

namespace gkbm {

/// Log-likelihood-ratio weights for one candidate pair at kernel value psi:
///   edge_weight    = log( p (1 - q psi) / (q (1 - p psi)) )
///   nonedge_weight = log( (1 - p psi) / (1 - q psi) )
/// For 0 < q < p < 1 and psi in (0, 1], edge_weight > 0 and
/// nonedge_weight < 0; at psi = 0 the nonedge weight is exactly 0. p == q
/// gives identically zero weights (identical hypotheses).
struct PairWeight {
  double edge_weight{0.0};
  double nonedge_weight{0.0};
};

/// Requires p, q in (0, 1) or p == q; throws otherwise (p or q at 0 or 1
/// would make the weights infinite).
PairWeight pair_weight(double p, double q, double psi);

/// Common-neighbour count thresholds for the initial block:
///   i_val = I(x_u, x_v, B) = Int_B psi(x_u, z) psi(x_v, z) dz
///   m_in  = lambda (p^2+q^2)/2 * i_val
///   m_out = lambda p q * i_val
///   m     = (m_in + m_out)/2 = lambda (p+q)^2/4 * i_val
struct CommonNeighborThreshold {
  double i_val{0.0};
  double m_in{0.0};
  double m_out{0.0};
  double m{0.0};
};

CommonNeighborThreshold common_neighbor_threshold(const GkbmInstance& inst,
                                                  int u, int v, int block,
                                                  double tol = 1e-9);

/// Work counters for the linear-time contract. ops() is the number of
/// candidate pairs the pipeline touched across all stages.
struct RuntimeStats {
  double wall_seconds{0.0};
  std::size_t edge_count{0};
  std::size_t candidate_pairs{0};
  std::size_t init_ops{0};
  std::size_t propagate_ops{0};
  std::size_t refine_ops{0};
  std::size_t ops() const { return init_ops + propagate_ops + refine_ops; }
};

/// Per-node propagation statistic
///   f(u) = sum_{v in source, psi > 0} sigma(v) [A_uv edge_w + nonedge_w].
/// Zero labels contribute nothing. Exposed for tests.
double propagate_statistic(const GkbmInstance& inst, const Labeling& labels,
                           int u, std::span<const std::int32_t> source_nodes);

/// Refinement statistic g(u) over the visibility region of u (all v != u
/// with psi_n(u, v) > 0); u's own label is never used.
double refine_statistic(const GkbmInstance& inst, const Labeling& labels, int u);

/// Anchor u0 = lowest index in the block gets +1; every other node gets +1
/// iff its common-neighbour count with u0 (inside the block) strictly
/// exceeds m(u, u0, B). Empty block yields an all-zero labeling.
Labeling initial_block_recovery(const GkbmInstance& inst, int block,
                                double tol = 1e-9, RuntimeStats* stats = nullptr);

/// Labels the target node set from the source node set's labels: +1 iff
/// f(u) > 0, else -1. Returned labeling is full-length with nonzero entries
/// on the target only.
Labeling propagate(const GkbmInstance& inst, const Labeling& source_labels,
                   std::span<const std::int32_t> source_nodes,
                   std::span<const std::int32_t> target_nodes,
                   RuntimeStats* stats = nullptr);

/// Convenience wrapper: propagate between two partition blocks.
Labeling propagate_blocks(const GkbmInstance& inst, const Labeling& source_labels,
                          int source_block, int target_block,
                          RuntimeStats* stats = nullptr);

/// Phase I: initial recovery on the first non-empty block, then one forward
/// cyclic sweep of propagation over HALF-blocks. Full-width steps would put
/// the far edge of each target block out of kernel range of most of its
/// source block (psi = 0), letting edge errors cluster and amplify; with
/// half-width steps every source is visible from every target (max pair
/// distance = the support radius), which is what the propagation error
/// analysis needs. If a step's source half is empty or unlabeled, the
/// sweep falls back one more half-block (partial visibility); failing that
/// the target stays 0-labeled and Phase II decides it.
Labeling phase1(const GkbmInstance& inst, double tol = 1e-9,
                RuntimeStats* stats = nullptr);

/// Phase II: relabels every node by the sign of g (ties to -1), reading only
/// the frozen initial labels.
Labeling refine(const GkbmInstance& inst, const Labeling& initial,
                RuntimeStats* stats = nullptr);

/// phase1 followed by refine, with wall time and work counters.
std::pair<Labeling, RuntimeStats> full_pipeline(const GkbmInstance& inst,
                                                double tol = 1e-9);

}  // namespace gkbm
