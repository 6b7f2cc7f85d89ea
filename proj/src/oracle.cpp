#include "gkbm/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gkbm/rng.hpp"

namespace gkbm {

namespace {

void check_complete(const GkbmInstance& inst, const Labeling& labeling) {
  if (labeling.size() != static_cast<std::size_t>(inst.node_count))
    throw std::invalid_argument("log_likelihood: labeling length mismatch");
  for (std::size_t i = 0; i < labeling.size(); ++i) {
    if (labeling[i] != 1 && labeling[i] != -1)
      throw std::invalid_argument("log_likelihood: labeling must be complete (+-1)");
  }
}

template <class Emit>
double likelihood_scan(const GkbmInstance& inst, const Labeling& labeling, Emit&& emit) {
  const GkbmParams& params = inst.params;
  double sum = 0.0;
  std::size_t edges_seen = 0;
  inst.for_each_candidate_pair([&](std::int32_t u, std::int32_t v, double psi) {
    const double r = labeling[u] == labeling[v] ? params.p : params.q;
    double term;
    if (inst.has_edge(u, v)) {
      ++edges_seen;
      term = std::log(r * psi);
    } else {
      term = std::log1p(-r * psi);
    }
    sum += term;
    emit(u, v, term);
  });
  if (edges_seen != inst.edge_count()) {
    throw std::runtime_error(
        "log_likelihood: instance has an edge outside the kernel support (psi = 0)");
  }
  return sum;
}

}  // namespace

double log_likelihood(const GkbmInstance& inst, const Labeling& labeling) {
  check_complete(inst, labeling);
  return likelihood_scan(inst, labeling, [](std::int32_t, std::int32_t, double) {});
}

LikelihoodBreakdown log_likelihood_breakdown(const GkbmInstance& inst,
                                             const Labeling& labeling) {
  check_complete(inst, labeling);
  LikelihoodBreakdown out;
  out.log_likelihood = likelihood_scan(
      inst, labeling, [&](std::int32_t u, std::int32_t v, double term) {
        out.per_pair_terms.push_back({u, v, term});
      });
  return out;
}

MapResult map_estimate(const GkbmInstance& inst) {
  const int n = inst.node_count;
  if (n > 22)
    throw std::invalid_argument(
        "map_estimate: refusing exhaustive search for N > 22 nodes");
  MapResult result;
  result.labeling = Labeling(n);
  if (n == 0) return result;

  Labeling candidate(n);
  candidate[0] = +1;
  const int free_nodes = n - 1;
  const std::uint64_t total = 1ull << free_nodes;
  double best = -std::numeric_limits<double>::infinity();
  // k ascending is lexicographic order with node 1 as the most significant
  // position and -1 < +1, so the first maximum seen is the smallest.
  for (std::uint64_t k = 0; k < total; ++k) {
    for (int j = 0; j < free_nodes; ++j) {
      const bool plus = (k >> (free_nodes - 1 - j)) & 1ull;
      candidate[j + 1] = plus ? std::int8_t{+1} : std::int8_t{-1};
    }
    const double ll = log_likelihood(inst, candidate);
    if (ll > best) {
      best = ll;
      result.labeling = candidate;
      result.tie = false;
    } else if (ll == best) {
      result.tie = true;
    }
  }
  result.log_likelihood = best;
  return result;
}

ComponentMapResult component_map(const GkbmInstance& inst, int u,
                                 const Labeling& others) {
  if (u < 0 || u >= inst.node_count)
    throw std::invalid_argument("component_map: node index out of range");
  Labeling work = others;
  if (work.size() != static_cast<std::size_t>(inst.node_count))
    throw std::invalid_argument("component_map: labeling length mismatch");
  work[u] = +1;
  const double ll_plus = log_likelihood(inst, work);
  work[u] = -1;
  const double ll_minus = log_likelihood(inst, work);
  ComponentMapResult result;
  result.tie = ll_plus == ll_minus;
  result.sign = ll_plus > ll_minus ? +1 : -1;
  return result;
}

PoissonTestResult poisson_test_experiment(const PoissonProfile& null_profile,
                                          const PoissonProfile& alt_profile,
                                          int n, std::int64_t trials,
                                          std::uint64_t seed) {
  if (null_profile.entries.size() != alt_profile.entries.size())
    throw std::invalid_argument("poisson_test_experiment: profiles differ in length");
  if (trials < 1) throw std::invalid_argument("poisson_test_experiment: trials must be >= 1");
  if (n < 2) throw std::invalid_argument("poisson_test_experiment: n must be >= 2");

  const double logn = std::log(static_cast<double>(n));
  const std::size_t m = null_profile.entries.size();
  std::vector<double> mean(m), shift(m), logratio(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = null_profile.entries[i];
    const double b = alt_profile.entries[i];
    mean[i] = a * logn;
    shift[i] = (b - a) * logn;
    if (a > 0.0 && b > 0.0) logratio[i] = std::log(a / b);
    else if (a > 0.0) logratio[i] = std::numeric_limits<double>::infinity();
    else if (b > 0.0) logratio[i] = -std::numeric_limits<double>::infinity();
    else logratio[i] = 0.0;
  }

  SplitMix64 rng = substream(seed, stream::poisson_test);
  std::int64_t errors = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    double llr = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::int64_t k = poisson(rng, mean[i]);
      llr += shift[i];
      scale += std::fabs(shift[i]);
      if (k > 0) {
        const double term = static_cast<double>(k) * logratio[i];
        llr += term;
        scale += std::fabs(term);
      }
    }
    // Algebraic ties (common for symmetric profiles) must not be decided by
    // summation rounding; anything at ulp scale is a tie and gets the coin.
    bool decide_null;
    if (std::isinf(llr)) decide_null = llr > 0.0;
    else if (llr > 1e-12 * scale) decide_null = true;
    else if (llr < -1e-12 * scale) decide_null = false;
    else decide_null = (rng() & 1ull) != 0;
    if (!decide_null) ++errors;
  }

  const ChDivergence d = ch_divergence(null_profile, alt_profile);
  PoissonTestResult result;
  result.error_rate = static_cast<double>(errors) / static_cast<double>(trials);
  result.predicted_exponent = d.value;
  result.t_star = d.t_star;
  return result;
}

}  // namespace gkbm
