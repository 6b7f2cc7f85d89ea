#include "gkbm/recovery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gkbm/quadrature.hpp"

namespace gkbm {

PairWeight pair_weight(double p, double q, double psi) {
  if (p == q) return {0.0, 0.0};
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw std::invalid_argument("pair_weight: p, q must be in (0, 1) unless p == q");
  const double lp = std::log1p(-p * psi);
  const double lq = std::log1p(-q * psi);
  PairWeight w;
  w.edge_weight = std::log(p) - std::log(q) + lq - lp;
  w.nonedge_weight = lp - lq;
  return w;
}

CommonNeighborThreshold common_neighbor_threshold(const GkbmInstance& inst,
                                                  int u, int v, int block,
                                                  double tol) {
  const GkbmParams& params = inst.params;
  const double left = inst.partition.left_of(block);
  const double width = inst.partition.width_of(block);
  const double scale = params.n / std::log(static_cast<double>(params.n));
  const double radius = inst.support_radius();

  auto kernel_at = [&](TorusPoint x, double t) {
    const TorusPoint z = TorusPoint::from(left + t);
    return params.kernel(scale * torus_distance(x, z));
  };
  auto integrand = [&](double t) {
    return kernel_at(inst.locations[u], t) * kernel_at(inst.locations[v], t);
  };

  // Split where either factor crosses a kernel breakpoint: z = x +- bk*r.
  std::vector<double> cuts;
  for (int w : {u, v}) {
    for (double bk : params.kernel.breakpoints()) {
      for (double sign : {-1.0, 1.0}) {
        const double z = inst.locations[w].coordinate + sign * bk * radius;
        double t = z - left;
        t -= std::floor(t);
        if (t > 0.0 && t < width) cuts.push_back(t);
      }
    }
  }

  CommonNeighborThreshold out;
  out.i_val = integrate(integrand, 0.0, width, tol, cuts);
  // The point process has density lambda*n on the torus, so the expected
  // common-neighbour counts carry lambda*n, not lambda alone.
  const double intensity = params.lambda * params.n;
  out.m_in = intensity * 0.5 * (params.p * params.p + params.q * params.q) * out.i_val;
  out.m_out = intensity * params.p * params.q * out.i_val;
  out.m = 0.5 * (out.m_in + out.m_out);
  return out;
}

double propagate_statistic(const GkbmInstance& inst, const Labeling& labels,
                           int u, std::span<const std::int32_t> source_nodes) {
  const GkbmParams& params = inst.params;
  double f = 0.0;
  for (std::int32_t v : source_nodes) {
    if (v == u) continue;
    const std::int8_t label = labels[v];
    if (label == 0) continue;
    const double psi = inst.psi(u, v);
    if (!(psi > 0.0)) continue;
    const PairWeight w = pair_weight(params.p, params.q, psi);
    const double term = inst.has_edge(u, v) ? w.edge_weight + w.nonedge_weight
                                            : w.nonedge_weight;
    f += label * term;
  }
  return f;
}

double refine_statistic(const GkbmInstance& inst, const Labeling& labels, int u) {
  const GkbmParams& params = inst.params;
  double g = 0.0;
  inst.for_each_candidate(u, [&](std::int32_t v, double psi) {
    const std::int8_t label = labels[v];
    if (label == 0) return;
    const PairWeight w = pair_weight(params.p, params.q, psi);
    const double term = inst.has_edge(u, v) ? w.edge_weight + w.nonedge_weight
                                            : w.nonedge_weight;
    g += label * term;
  });
  return g;
}

namespace {

void initial_block_into(const GkbmInstance& inst, int block, double tol,
                        Labeling& labels, RuntimeStats* stats) {
  const auto& nodes = inst.block_nodes[block];
  if (nodes.empty()) return;
  const std::int32_t u0 = nodes.front();
  labels[u0] = +1;
  for (std::int32_t u : nodes) {
    if (u == u0) continue;
    // Common neighbours of u0 and u within the block.
    std::size_t count = 0;
    const auto& a = inst.neighbors[u0];
    const auto& b = inst.neighbors[u];
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j]) ++i;
      else if (b[j] < a[i]) ++j;
      else {
        if (inst.node_block[a[i]] == block) ++count;
        ++i;
        ++j;
      }
    }
    if (stats) stats->init_ops += a.size() + b.size();
    const CommonNeighborThreshold thr = common_neighbor_threshold(inst, u, u0, block, tol);
    labels[u] = count > thr.m ? std::int8_t{+1} : std::int8_t{-1};
  }
}

void propagate_into(const GkbmInstance& inst, const Labeling& source_labels,
                    std::span<const std::int32_t> source_nodes,
                    std::span<const std::int32_t> target_nodes, Labeling& out,
                    RuntimeStats* stats) {
  for (std::int32_t u : target_nodes) {
    const double f = propagate_statistic(inst, source_labels, u, source_nodes);
    if (stats) stats->propagate_ops += source_nodes.size();
    out[u] = f > 0.0 ? std::int8_t{+1} : std::int8_t{-1};
  }
}

}  // namespace

Labeling initial_block_recovery(const GkbmInstance& inst, int block, double tol,
                                RuntimeStats* stats) {
  Labeling labels(inst.node_count);
  initial_block_into(inst, block, tol, labels, stats);
  return labels;
}

Labeling propagate(const GkbmInstance& inst, const Labeling& source_labels,
                   std::span<const std::int32_t> source_nodes,
                   std::span<const std::int32_t> target_nodes,
                   RuntimeStats* stats) {
  if (source_labels.size() != static_cast<std::size_t>(inst.node_count))
    throw std::invalid_argument("propagate: labeling length mismatch");
  Labeling out(inst.node_count);
  propagate_into(inst, source_labels, source_nodes, target_nodes, out, stats);
  return out;
}

Labeling propagate_blocks(const GkbmInstance& inst, const Labeling& source_labels,
                          int source_block, int target_block,
                          RuntimeStats* stats) {
  return propagate(inst, source_labels, inst.block_nodes[source_block],
                   inst.block_nodes[target_block], stats);
}

Labeling phase1(const GkbmInstance& inst, double tol, RuntimeStats* stats) {
  Labeling labels(inst.node_count);
  if (inst.node_count == 0) return labels;

  const int b = inst.partition.block_count();
  int start = -1;
  for (int i = 0; i < b; ++i) {
    if (!inst.block_nodes[i].empty()) {
      start = i;
      break;
    }
  }
  if (start < 0) return labels;

  initial_block_into(inst, start, tol, labels, stats);

  // Half-block sweep sets: block i splits at its midpoint into halves 2i
  // and 2i+1. Adjacent halves are at most one support radius apart, so
  // every source is visible from every target.
  const int halves = 2 * b;
  std::vector<std::vector<std::int32_t>> half_nodes(halves);
  for (int i = 0; i < b; ++i) {
    const double mid = inst.partition.left_of(i) + 0.5 * inst.partition.width_of(i);
    for (std::int32_t u : inst.block_nodes[i]) {
      double shifted = inst.locations[u].coordinate;
      if (shifted < 0.0) shifted += 1.0;
      half_nodes[2 * i + (shifted < mid ? 0 : 1)].push_back(u);
    }
  }

  std::vector<char> labeled(halves, 0);
  labeled[2 * start] = 1;
  labeled[2 * start + 1] = 1;
  auto eligible = [&](int h) { return labeled[h] && !half_nodes[h].empty(); };
  for (int step = 2; step < halves; ++step) {
    const int target = (2 * start + step) % halves;
    const int back1 = (target - 1 + halves) % halves;
    const int back2 = (target - 2 + halves) % halves;
    int source = -1;
    if (eligible(back1)) source = back1;
    else if (halves > 2 && back2 != target && eligible(back2)) source = back2;
    if (source >= 0 && !half_nodes[target].empty()) {
      propagate_into(inst, labels, half_nodes[source], half_nodes[target], labels,
                     stats);
      labeled[target] = 1;
    }
    // else: propagation break; nodes stay 0 and Phase II decides them.
  }
  return labels;
}

Labeling refine(const GkbmInstance& inst, const Labeling& initial,
                RuntimeStats* stats) {
  if (initial.size() != static_cast<std::size_t>(inst.node_count))
    throw std::invalid_argument("refine: labeling length mismatch");
  Labeling out(inst.node_count);
  const GkbmParams& params = inst.params;
  for (int u = 0; u < inst.node_count; ++u) {
    double g = 0.0;
    std::size_t visited = 0;
    inst.for_each_candidate(u, [&](std::int32_t v, double psi) {
      ++visited;
      const std::int8_t label = initial[v];
      if (label == 0) return;
      const PairWeight w = pair_weight(params.p, params.q, psi);
      const double term = inst.has_edge(u, v) ? w.edge_weight + w.nonedge_weight
                                              : w.nonedge_weight;
      g += label * term;
    });
    if (stats) stats->refine_ops += visited;
    out[u] = g > 0.0 ? std::int8_t{+1} : std::int8_t{-1};
  }
  return out;
}

std::pair<Labeling, RuntimeStats> full_pipeline(const GkbmInstance& inst, double tol) {
  RuntimeStats stats;
  const auto t0 = std::chrono::steady_clock::now();
  const Labeling initial = phase1(inst, tol, &stats);
  const Labeling final_labels = refine(inst, initial, &stats);
  const auto t1 = std::chrono::steady_clock::now();
  stats.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  stats.edge_count = inst.edge_count();
  std::size_t pairs = 0;
  inst.for_each_candidate_pair([&](std::int32_t, std::int32_t, double) { ++pairs; });
  stats.candidate_pairs = pairs;
  return {final_labels, stats};
}

}  // namespace gkbm
