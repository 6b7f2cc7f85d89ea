#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkbm/kernel.hpp"

namespace gkbm {

enum class Verdict { impossible_disconnect, impossible_information, recoverable, boundary };
std::string to_string(Verdict v);

/// Everything the thresholds decide for one parameter set. Constants that
/// need lambda*kappa > 1 (delta_low and its dependents) or epsilon > 0 /
/// p != q (prop_budget) are absent when undefined.
struct ThresholdReport {
  double lambda{0.0};
  double p{0.0};
  double q{0.0};
  double kappa{0.0};
  double epsilon{0.0};
  double lambda_kappa{0.0};
  double info{0.0};         // I_phi(p, q)
  double lambda_info{0.0};  // lambda * I_phi(p, q)
  double init_exponent{0.0};
  double delta_cap{0.0};    // Delta, block-occupancy upper constant
  std::optional<double> delta_low;    // delta, block-occupancy lower constant
  std::optional<double> prop_budget;  // M, per-block propagation error budget
  std::optional<double> c1;
  std::optional<double> c2;
  Verdict verdict{Verdict::recoverable};
};

/// I_phi(p,q) = 2 * Int_0^kappa [1 - sqrt(pq) phi(x)
///                - sqrt((1 - p phi(x))(1 - q phi(x)))] dx
/// by adaptive quadrature split at the kernel's breakpoints.
double info_metric(const Kernel& kernel, double p, double q, double tol = 1e-9);

/// Coefficient vector of log n for a stack of independent Poisson entries.
struct PoissonProfile {
  std::vector<double> entries;
};

struct ChDivergence {
  double value{0.0};
  double t_star{0.0};
};

/// Chernoff-Hellinger divergence
///   D_+(alpha, beta) = sup_{t in [0,1]} sum_i [t a_i + (1-t) b_i - a_i^t b_i^(1-t)]
/// maximized by ternary search on the concave objective. Entries with
/// a_i = b_i = 0 contribute nothing; 0^t is 0 for t in (0,1] and 1 at t = 0.
ChDivergence ch_divergence(const PoissonProfile& alpha, const PoissonProfile& beta);

/// Null/alternate Poisson coefficient vectors for the community hypothesis
/// test: per distinct level c_s, entries lambda*vol(Gamma_s)*(p c_s, 1-p c_s,
/// q c_s, 1-q c_s); the alternate swaps p and q. The two-sided region factor
/// vol(R_s) = 2 vol(Gamma_s) log n / n cancels against community thinning.
std::pair<PoissonProfile, PoissonProfile> profiles_for_test(
    const SimpleApproximation& approx, double lambda, double p, double q);

/// Initialization exponent I'(p,q): the minimum of the two bracketed
/// expressions, as displayed in the definition equation.
double init_exponent(double p, double q);

/// The same quantity as the two propositions' proofs state it (the paper's
/// display and its proofs differ by constant factors; both are exposed,
/// neither feeds the recovery algorithm).
double init_exponent_proof(double p, double q);

ThresholdReport derived_constants(double lambda, const Kernel& kernel, double p,
                                  double q, double tol = 1e-9);

/// n^(-lambda*kappa), the probability that a full-width block is empty.
double empty_block_probability(double lambda, double kappa, int n);

struct PoissonTail {
  double upper{1.0};  // P(X >= t) <= exp(-(t-mu)^2 / (2t))
  double lower{1.0};  // P(X <= t) <= exp(-(t log(t/mu) + mu - t)), 0 < t < mu
};
PoissonTail poisson_tail_bounds(double mu, double t);

/// P(X >= mean(1+t)) <= (e^t / (1+t)^(1+t))^mean for X binomial with the
/// given mean. The trial count only bounds the support; the bound itself
/// depends on the mean alone.
double binomial_tail_bound(double trials, double mean, double t);

struct RenyiBounds {
  double xi1{0.0};
  double xi2{0.0};
  double xi3{0.0};
  double xi4{0.0};
};

/// Uniform Renyi-divergence bounds over psi in [epsilon, 1]:
///   xi1 >= D_{3/2}(Ber(p psi) || Ber(q psi))
///   xi2 >= D_{3/2}(Ber(q psi) || Ber(p psi))
///   xi3 >= D_{1/2}(Ber(p psi), Ber(q psi)) >= xi4
RenyiBounds renyi_bounds(double p, double q, double epsilon);

}  // namespace gkbm
