#include "gkbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gkbm {

void GkbmParams::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("GkbmParams: lambda must be > 0");
  if (n < 3) throw std::invalid_argument("GkbmParams: n must be >= 3");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("GkbmParams: p must be in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("GkbmParams: q must be in [0, 1]");
  // Throws when kappa*log(n)/n >= 1/2.
  BlockPartition::build(n, kernel.kappa());
}

AgreementResult agreement(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) throw std::invalid_argument("agreement: labelings differ in length");
  std::int64_t same = 0, opposite = 0, compared = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0 || b[i] == 0) continue;
    ++compared;
    if (a[i] == b[i]) ++same;
    else ++opposite;
  }
  AgreementResult result;
  result.flip = same >= opposite ? +1 : -1;
  result.matched = std::max(same, opposite);
  result.compared = compared;
  return result;
}

std::size_t GkbmInstance::edge_count() const {
  std::size_t twice = 0;
  for (const auto& list : neighbors) twice += list.size();
  return twice / 2;
}

bool GkbmInstance::has_edge(int u, int v) const {
  const auto& list = neighbors[u];
  return std::binary_search(list.begin(), list.end(), static_cast<std::int32_t>(v));
}

double GkbmInstance::psi(int u, int v) const {
  return psi_n(params.kernel, params.n, locations[u], locations[v]);
}

void GkbmInstance::rebuild_index() {
  node_count = static_cast<int>(locations.size());
  partition = BlockPartition::build(params.n, params.kernel.kappa());
  node_block.assign(node_count, 0);
  block_nodes.assign(partition.block_count(), {});
  for (int u = 0; u < node_count; ++u) {
    const int b = partition.block_of(locations[u]);
    node_block[u] = b;
    block_nodes[b].push_back(u);
  }
  for (auto& list : neighbors) std::sort(list.begin(), list.end());
}

namespace {

GkbmInstance sample_impl(const GkbmParams& params, const TorusPoint* anchor,
                         int anchor_community) {
  params.validate();
  GkbmInstance inst;
  inst.params = params;

  SplitMix64 count_rng = substream(params.seed, stream::node_count);
  const std::int64_t drawn = poisson(count_rng, params.lambda * params.n);
  const int extra = anchor ? 1 : 0;
  inst.node_count = static_cast<int>(drawn) + extra;

  inst.locations.resize(inst.node_count);
  inst.communities.resize(inst.node_count);
  SplitMix64 loc_rng = substream(params.seed, stream::locations);
  SplitMix64 comm_rng = substream(params.seed, stream::communities);
  if (anchor) {
    inst.locations[0] = *anchor;
    inst.communities[0] = static_cast<std::int8_t>(anchor_community >= 0 ? +1 : -1);
  }
  for (int u = extra; u < inst.node_count; ++u) {
    inst.locations[u] = TorusPoint::from(uniform01(loc_rng));
    inst.communities[u] = (comm_rng() & 1ull) ? std::int8_t{+1} : std::int8_t{-1};
  }

  inst.neighbors.assign(inst.node_count, {});
  inst.rebuild_index();

  // Edges: one substream per unordered block pair; pair enumeration order is
  // fixed (sorted node indices), so instances are reproducible bit-for-bit.
  const int b = inst.partition.block_count();
  for (int i = 0; i < b; ++i) {
    for (int j : inst.partition.reachable_blocks(i)) {
      if (j < i) continue;
      SplitMix64 edge_rng = substream(params.seed, stream::edges,
                                      static_cast<std::uint64_t>(i),
                                      static_cast<std::uint64_t>(j));
      auto try_link = [&](std::int32_t u, std::int32_t v) {
        const double val = inst.psi(u, v);
        const double rate = inst.communities[u] == inst.communities[v] ? params.p : params.q;
        if (uniform01(edge_rng) < rate * val) {
          inst.neighbors[u].push_back(v);
          inst.neighbors[v].push_back(u);
        }
      };
      if (i == j) {
        const auto& nodes = inst.block_nodes[i];
        for (std::size_t a = 0; a < nodes.size(); ++a)
          for (std::size_t c = a + 1; c < nodes.size(); ++c) try_link(nodes[a], nodes[c]);
      } else {
        for (std::int32_t u : inst.block_nodes[i])
          for (std::int32_t v : inst.block_nodes[j]) try_link(u, v);
      }
    }
  }
  for (auto& list : inst.neighbors) std::sort(list.begin(), list.end());
  return inst;
}

}  // namespace

GkbmInstance sample(const GkbmParams& params) {
  return sample_impl(params, nullptr, 0);
}

GkbmInstance sample_with_anchor(const GkbmParams& params, TorusPoint anchor,
                                int anchor_community) {
  return sample_impl(params, &anchor, anchor_community);
}

double edge_probability(const GkbmParams& params, TorusPoint x, TorusPoint y,
                        bool same_community) {
  const double val = psi_n(params.kernel, params.n, x, y);
  return (same_community ? params.p : params.q) * val;
}

}  // namespace gkbm
