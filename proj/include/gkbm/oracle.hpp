#pragma once

#include <cstdint>
#include <vector>

#include "gkbm/info.hpp"
#include "gkbm/model.hpp"

namespace gkbm {

/// Model log-likelihood of the adjacency given a full +-1 labeling and the
/// locations: sum over in-support unordered pairs of log(r psi) for edges
/// and log(1 - r psi) for non-edges, r = p or q by label agreement.
struct LikelihoodBreakdown {
  struct Term {
    std::int32_t u{0};
    std::int32_t v{0};
    double value{0.0};
  };
  double log_likelihood{0.0};
  std::vector<Term> per_pair_terms;
};

/// Throws when the labeling is incomplete (zeros) or an edge violates the
/// support invariant (edge with psi = 0: corrupt instance).
double log_likelihood(const GkbmInstance& inst, const Labeling& labeling);
LikelihoodBreakdown log_likelihood_breakdown(const GkbmInstance& inst,
                                             const Labeling& labeling);

struct MapResult {
  Labeling labeling;
  double log_likelihood{0.0};
  bool tie{false};  // the maximum was attained by more than one labeling
};

/// Exhaustive MAP over all labelings with node 0 pinned to +1 (flip
/// symmetry halves the search). Ties resolve to the lexicographically
/// smallest labeling (-1 < +1, scanning node 1 upward). Refuses N > 22.
MapResult map_estimate(const GkbmInstance& inst);

struct ComponentMapResult {
  int sign{-1};
  bool tie{false};
};

/// Sign of the community of node u maximizing the likelihood given all
/// other labels; ties go to -1 (matching the recovery tie rule). Computed
/// from two full likelihood evaluations, independent of the recovery path.
ComponentMapResult component_map(const GkbmInstance& inst, int u,
                                 const Labeling& others);

struct PoissonTestResult {
  double error_rate{0.0};
  double predicted_exponent{0.0};  // D_+ of the two profiles
  double t_star{0.0};
};

/// Simulates the Poisson hypothesis test underlying the CH exponent: draws
/// `trials` vectors with entry i ~ Poisson(null_i * log n), decides by the
/// likelihood ratio between null and alternate (ties by a fair coin), and
/// returns the empirical error rate together with D_+.
PoissonTestResult poisson_test_experiment(const PoissonProfile& null_profile,
                                          const PoissonProfile& alt_profile,
                                          int n, std::int64_t trials,
                                          std::uint64_t seed);

}  // namespace gkbm
