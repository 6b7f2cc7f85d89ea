#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gkbm/oracle.hpp"
#include "gkbm/recovery.hpp"
#include "test_support.hpp"

using namespace gkbm;
using namespace gkbm::test;

namespace {

GkbmParams make_params(double lambda, int n, double p, double q, std::uint64_t seed,
                       Kernel kernel = Kernel::indicator(1.0)) {
  GkbmParams params;
  params.lambda = lambda;
  params.n = n;
  params.p = p;
  params.q = q;
  params.kernel = kernel;
  params.seed = seed;
  return params;
}

/// Distribution of a sum of independent Bernoullis (Poisson-binomial) by DP;
/// returns P(count <= threshold).
double poisson_binomial_cdf(const std::vector<double>& probs, double threshold) {
  std::vector<double> dist{1.0};
  for (double pi : probs) {
    std::vector<double> next(dist.size() + 1, 0.0);
    for (std::size_t k = 0; k < dist.size(); ++k) {
      next[k] += dist[k] * (1.0 - pi);
      next[k + 1] += dist[k] * pi;
    }
    dist = std::move(next);
  }
  double cdf = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (static_cast<double>(k) <= threshold) cdf += dist[k];
  }
  return cdf;
}

}  // namespace

TEST_CASE("pair weights: signs, zero support, degenerate p = q") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 10000; ++trial) {
    const double q = 0.02 + uniform01(rng) * 0.45;
    const double p = q + 0.02 + uniform01(rng) * (0.95 - q);
    const double psi = 1e-6 + uniform01(rng) * (1.0 - 1e-6);
    const PairWeight w = pair_weight(p, q, psi);
    CHECK(w.edge_weight > 0.0);
    CHECK(w.nonedge_weight < 0.0);
  }
  const PairWeight zero_psi = pair_weight(0.8, 0.2, 0.0);
  CHECK(zero_psi.nonedge_weight == 0.0);
  CHECK(zero_psi.edge_weight == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  const PairWeight same = pair_weight(0.3, 0.3, 0.7);
  CHECK(same.edge_weight == 0.0);
  CHECK(same.nonedge_weight == 0.0);

  CHECK_THROWS_AS(pair_weight(1.0, 0.2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(pair_weight(0.5, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("common-neighbour threshold against the interval-overlap oracle") {
  const GkbmInstance inst = sample(make_params(2.0, 2000, 0.9, 0.1, 11));
  const double radius = inst.support_radius();
  int checked = 0;
  for (int block = 0; block < inst.partition.block_count() && checked < 40; ++block) {
    const auto& nodes = inst.block_nodes[block];
    if (nodes.size() < 2) continue;
    for (std::size_t i = 0; i + 1 < nodes.size() && checked < 40; i += 2, ++checked) {
      const int u = nodes[i], v = nodes[i + 1];
      const CommonNeighborThreshold thr = common_neighbor_threshold(inst, u, v, block);
      double lo = inst.partition.left_of(block);
      const double expected = indicator_overlap_oracle(
          inst.locations[u].coordinate, inst.locations[v].coordinate, radius, lo,
          lo + inst.partition.width_of(block));
      CHECK(std::fabs(thr.i_val - expected) <= 1e-8);
      // Field relations.
      const double intensity = inst.params.lambda * inst.params.n;
      CHECK(thr.m_in == doctest::Approx(intensity * 0.41 * thr.i_val).epsilon(1e-12));
      CHECK(thr.m_out == doctest::Approx(intensity * 0.09 * thr.i_val).epsilon(1e-12));
      CHECK(thr.m == doctest::Approx(0.5 * (thr.m_in + thr.m_out)).epsilon(1e-12));
      CHECK(thr.m_out < thr.m);
      CHECK(thr.m < thr.m_in);
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("common-neighbour threshold degenerate cases") {
  GkbmInstance inst = sample(make_params(1.0, 1000, 0.5, 0.5, 3));
  int block = 0;
  while (inst.block_nodes[block].size() < 2) ++block;
  const int u = inst.block_nodes[block][0], v = inst.block_nodes[block][1];
  // p = q: all three thresholds coincide.
  const CommonNeighborThreshold thr = common_neighbor_threshold(inst, u, v, block);
  CHECK(thr.m_in == doctest::Approx(thr.m_out).epsilon(1e-12));
  CHECK(thr.m == doctest::Approx(thr.m_in).epsilon(1e-12));
  // A far-away block: psi vanishes identically on it.
  const int far = (block + inst.partition.block_count() / 2) % inst.partition.block_count();
  const CommonNeighborThreshold zero = common_neighbor_threshold(inst, u, v, far);
  CHECK(zero.i_val == 0.0);
  CHECK(zero.m == 0.0);
}

TEST_CASE("initial block recovery: empty and singleton blocks") {
  const GkbmInstance inst = sample(make_params(0.4, 300, 0.9, 0.1, 21));
  int empty = -1, single = -1;
  for (int i = 0; i < inst.partition.block_count(); ++i) {
    if (inst.block_nodes[i].empty() && empty < 0) empty = i;
    if (inst.block_nodes[i].size() == 1 && single < 0) single = i;
  }
  REQUIRE(empty >= 0);
  REQUIRE(single >= 0);
  const Labeling empty_labels = initial_block_recovery(inst, empty);
  for (std::size_t i = 0; i < empty_labels.size(); ++i) CHECK(empty_labels[i] == 0);
  const Labeling single_labels = initial_block_recovery(inst, single);
  CHECK(single_labels[inst.block_nodes[single][0]] == +1);
}

TEST_CASE("initial block recovery mechanics match a direct reimplementation") {
  for (std::uint64_t seed : {1ull, 5ull, 9ull}) {
    const GkbmInstance inst = sample(make_params(2.0, 2000, 0.9, 0.1, seed));
    int block = 0;
    while (inst.block_nodes[block].size() < 3) ++block;
    const Labeling labels = initial_block_recovery(inst, block);
    const auto& nodes = inst.block_nodes[block];
    const int anchor = nodes.front();
    CHECK(labels[anchor] == +1);
    for (std::int32_t u : nodes) {
      if (u == anchor) continue;
      int common = 0;
      for (std::int32_t v : nodes) {
        if (v == u || v == anchor) continue;
        if (inst.has_edge(anchor, v) && inst.has_edge(u, v)) ++common;
      }
      const double m = common_neighbor_threshold(inst, u, anchor, block).m;
      CHECK(labels[u] == (common > m ? +1 : -1));
    }
  }
}

TEST_CASE("initial block error count matches the Poisson-binomial oracle") {
  // For every non-anchor node the common-neighbour count is a sum of
  // independent Bernoullis with pair-specific probabilities; the exact
  // threshold-crossing probability is computable by DP. Observed errors
  // over many seeds must match the summed prediction.
  const double p = 0.9, q = 0.1;
  double expected = 0.0, variance = 0.0;
  int observed = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GkbmInstance inst = sample(make_params(2.0, 2000, p, q, seed));
    int block = 0;
    while (inst.block_nodes[block].size() < 2) ++block;
    const auto& nodes = inst.block_nodes[block];
    const int anchor = nodes.front();
    const Labeling labels = initial_block_recovery(inst, block);
    for (std::int32_t u : nodes) {
      if (u == anchor) continue;
      const bool same = inst.communities[u] == inst.communities[anchor];
      const bool labeled_same = labels[u] == +1;
      if (labeled_same != same) ++observed;

      std::vector<double> probs;
      for (std::int32_t v : nodes) {
        if (v == u || v == anchor) continue;
        const double pp = inst.psi(u, v) * inst.psi(anchor, v);
        double rate;
        if (!same) rate = p * q;
        else rate = inst.communities[v] == inst.communities[u] ? p * p : q * q;
        probs.push_back(pp * rate);
      }
      const double m = common_neighbor_threshold(inst, u, anchor, block).m;
      const double p_low = poisson_binomial_cdf(probs, m);  // P(count <= m)
      const double p_err = same ? p_low : 1.0 - p_low;
      expected += p_err;
      variance += p_err * (1.0 - p_err);
    }
  }
  CHECK(std::fabs(observed - expected) <= 4.0 * std::sqrt(variance) + 1.0);
}

TEST_CASE("propagate statistic matches a direct reimplementation") {
  const GkbmInstance inst = sample(make_params(2.0, 1000, 0.85, 0.15, 13));
  SplitMix64 rng(5);
  Labeling labels(inst.node_count);
  for (int u = 0; u < inst.node_count; ++u)
    labels[u] = static_cast<std::int8_t>((rng() % 3)) - 1;

  const int source = 3, target = 4;
  const double lp = std::log(inst.params.p), lq = std::log(inst.params.q);
  for (std::int32_t u : inst.block_nodes[target]) {
    double expected = 0.0;
    for (std::int32_t v : inst.block_nodes[source]) {
      if (labels[v] == 0) continue;
      const double psi = inst.psi(u, v);
      if (psi <= 0.0) continue;
      const double edge_w = lp - lq + std::log1p(-inst.params.q * psi) -
                            std::log1p(-inst.params.p * psi);
      const double nonedge_w = std::log1p(-inst.params.p * psi) -
                               std::log1p(-inst.params.q * psi);
      expected += labels[v] * ((inst.has_edge(u, v) ? edge_w : 0.0) + nonedge_w);
    }
    CHECK(propagate_statistic(inst, labels, u, inst.block_nodes[source]) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("propagate tie and dominance behaviour") {
  const GkbmInstance inst = sample(make_params(1.5, 800, 0.9, 0.1, 31));
  // All-zero source labels: f = 0 everywhere, ties resolve to -1.
  Labeling zeros(inst.node_count);
  const Labeling out = propagate(inst, zeros, inst.block_nodes[0], inst.block_nodes[1]);
  for (std::int32_t u : inst.block_nodes[1]) CHECK(out[u] == -1);
  for (std::int32_t u : inst.block_nodes[3]) CHECK(out[u] == 0);  // untouched

  // A single +1 source with an edge and q near 0: the edge weight dominates.
  int source_block = 0;
  std::int32_t src = -1, dst = -1;
  for (int b = 0; b < inst.partition.block_count() && src < 0; ++b) {
    for (std::int32_t u : inst.block_nodes[b]) {
      for (std::int32_t v : inst.neighbors[u]) {
        if (inst.node_block[v] == (b + 1) % inst.partition.block_count()) {
          source_block = b;
          src = u;
          dst = v;
          break;
        }
      }
      if (src >= 0) break;
    }
  }
  REQUIRE(src >= 0);
  GkbmInstance tweaked = inst;
  tweaked.params.q = 1e-6;
  Labeling one(inst.node_count);
  one[src] = +1;
  const double f = propagate_statistic(tweaked, one, dst, std::vector<std::int32_t>{src});
  CHECK(f > 0.0);
}

TEST_CASE("flip covariance of f and g is exact") {
  const GkbmInstance inst = sample(make_params(2.0, 1000, 0.8, 0.2, 17));
  SplitMix64 rng(23);
  Labeling labels(inst.node_count);
  Labeling negated(inst.node_count);
  for (int i = 0; i < inst.node_count; ++i) {
    labels[i] = static_cast<std::int8_t>((rng() % 3)) - 1;
    negated[i] = -labels[i];
  }
  int cases = 0;
  for (int u = 0; u < inst.node_count && cases < 10000; ++u, ++cases) {
    CHECK(refine_statistic(inst, negated, u) == -refine_statistic(inst, labels, u));
    const int sb = (inst.node_block[u] + 1) % inst.partition.block_count();
    CHECK(propagate_statistic(inst, negated, u, inst.block_nodes[sb]) ==
          -propagate_statistic(inst, labels, u, inst.block_nodes[sb]));
  }
}

TEST_CASE("locality: labels beyond the support radius cannot change g") {
  const GkbmInstance inst = sample(make_params(2.0, 1000, 0.8, 0.2, 29));
  const double radius = inst.support_radius();
  SplitMix64 rng(31);
  Labeling labels(inst.node_count);
  for (int i = 0; i < inst.node_count; ++i)
    labels[i] = static_cast<std::int8_t>((rng() % 3)) - 1;
  int cases = 0;
  for (int u = 0; u < inst.node_count && cases < 200; u += 7, ++cases) {
    Labeling perturbed = labels;
    for (int v = 0; v < inst.node_count; ++v) {
      if (torus_distance(inst.locations[u], inst.locations[v]) > radius)
        perturbed[v] = static_cast<std::int8_t>((rng() % 3)) - 1;
    }
    CHECK(refine_statistic(inst, perturbed, u) == refine_statistic(inst, labels, u));
  }
}

TEST_CASE("phase1 handles degenerate inputs") {
  // Empty instance.
  GkbmParams tiny = make_params(0.001, 300, 0.9, 0.1, 2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    tiny.seed = seed;
    const GkbmInstance inst = sample(tiny);
    if (inst.node_count == 0) {
      const Labeling labels = phase1(inst);
      CHECK(labels.size() == 0);
      break;
    }
  }
  // p = q: no signal, but a valid +-1 labeling with no crash.
  const GkbmInstance flat = sample(make_params(2.0, 1000, 0.5, 0.5, 7));
  const Labeling labels = phase1(flat);
  int nonzero = 0;
  for (int u = 0; u < flat.node_count; ++u) {
    CHECK(labels[u] >= -1);
    CHECK(labels[u] <= 1);
    if (labels[u] != 0) ++nonzero;
  }
  CHECK(nonzero > flat.node_count / 2);
}

TEST_CASE("phase1 achieves almost-exact recovery in the supercritical regime") {
  // lambda kappa = 3, lambda I = 2.4: mislabel fraction <= 0.05 in at least
  // 95 of 100 seeds (zeros count as errors, comparison is flip-aware).
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GkbmInstance inst = sample(make_params(3.0, 2000, 0.9, 0.1, seed));
    const Labeling labels = phase1(inst);
    const AgreementResult agree = agreement(labels, truth_of(inst));
    const double errors = static_cast<double>(inst.node_count - agree.matched);
    if (errors <= 0.05 * inst.node_count) ++good;
  }
  CHECK(good >= 95);
}

TEST_CASE("refine ties and zero-initial behaviour") {
  const GkbmInstance inst = sample(make_params(1.5, 600, 0.8, 0.2, 37));
  const Labeling zeros(inst.node_count);
  const Labeling out = refine(inst, zeros);
  for (int u = 0; u < inst.node_count; ++u) CHECK(out[u] == -1);
}

TEST_CASE("full pipeline determinism and degenerate parameters") {
  const GkbmParams params = make_params(2.0, 2000, 0.9, 0.1, 101);
  const GkbmInstance inst = sample(params);
  const auto [labels_a, stats_a] = full_pipeline(inst);
  const auto [labels_b, stats_b] = full_pipeline(inst);
  CHECK(labels_a.values == labels_b.values);
  CHECK(stats_a.ops() == stats_b.ops());
  CHECK(stats_a.edge_count == inst.edge_count());
  CHECK(stats_a.candidate_pairs > 0);
  CHECK(stats_a.refine_ops > 0);

  // Empty graph: completes with arbitrary +-1 labels.
  const GkbmInstance empty_graph = sample(make_params(1.0, 800, 0.0, 0.0, 5));
  const auto [labels_e, stats_e] = full_pipeline(empty_graph);
  for (int u = 0; u < empty_graph.node_count; ++u) {
    CHECK(labels_e[u] != 0);
  }
  CHECK(stats_e.edge_count == 0);
}

TEST_CASE("pipeline recovers exactly in a strongly supercritical cell") {
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GkbmInstance inst = sample(make_params(3.0, 2000, 0.9, 0.1, 500 + seed));
    const auto [labels, stats] = full_pipeline(inst);
    const AgreementResult agree = agreement(labels, truth_of(inst));
    if (agree.matched == inst.node_count && agree.compared == inst.node_count) ++exact;
  }
  CHECK(exact >= 18);
}

TEST_CASE("exact-recovery rate is monotone in n at fixed supercritical parameters") {
  // 100 seeds per size; one inversion of at most 2 percentage points is
  // allowed as Monte Carlo noise.
  std::vector<double> rates;
  for (int n : {1000, 2000, 4000, 8000}) {
    int exact = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const GkbmInstance inst =
          sample(make_params(2.5, n, 0.9, 0.1, mix64(7000 + n + seed)));
      const auto [labels, stats] = full_pipeline(inst);
      const AgreementResult agree = agreement(labels, truth_of(inst));
      if (agree.matched == inst.node_count && agree.compared == inst.node_count) ++exact;
    }
    rates.push_back(exact / 100.0);
  }
  int inversions = 0;
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (rates[i] < rates[i - 1]) {
      ++inversions;
      CHECK(rates[i - 1] - rates[i] <= 0.02);
    }
  }
  CHECK(inversions <= 1);
}
