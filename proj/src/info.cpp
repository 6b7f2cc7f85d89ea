#include "gkbm/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gkbm/quadrature.hpp"

namespace gkbm {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::impossible_disconnect: return "impossible_disconnect";
    case Verdict::impossible_information: return "impossible_information";
    case Verdict::recoverable: return "recoverable";
    case Verdict::boundary: return "boundary";
  }
  return "unknown";
}

double info_metric(const Kernel& kernel, double p, double q, double tol) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("info_metric: p, q must be in [0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("info_metric: tol must be > 0");
  const double spq = std::sqrt(p * q);
  auto integrand = [&](double x) {
    const double phi = kernel(x);
    return 1.0 - spq * phi - std::sqrt((1.0 - p * phi) * (1.0 - q * phi));
  };
  return 2.0 * integrate(integrand, 0.0, kernel.kappa(), tol, kernel.breakpoints());
}

namespace {

// t a + (1-t) b - a^t b^(1-t), with the 0^0 = 1 convention at the endpoints.
double ch_term(double a, double b, double t) {
  double cross;
  if (a <= 0.0) {
    cross = (t == 0.0) ? b : 0.0;
  } else if (b <= 0.0) {
    cross = (t == 1.0) ? a : 0.0;
  } else {
    cross = std::exp(t * std::log(a) + (1.0 - t) * std::log(b));
  }
  return t * a + (1.0 - t) * b - cross;
}

}  // namespace

ChDivergence ch_divergence(const PoissonProfile& alpha, const PoissonProfile& beta) {
  if (alpha.entries.size() != beta.entries.size())
    throw std::invalid_argument("ch_divergence: profiles differ in length");
  for (std::size_t i = 0; i < alpha.entries.size(); ++i) {
    if (alpha.entries[i] < 0.0 || beta.entries[i] < 0.0)
      throw std::invalid_argument("ch_divergence: coefficients must be >= 0");
  }

  auto objective = [&](double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.entries.size(); ++i) {
      sum += ch_term(alpha.entries[i], beta.entries[i], t);
    }
    return sum;
  };

  // Objective is concave in t (affine minus log-convex terms); ternary
  // search to interval width well below the 1e-10 tolerance.
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 140; ++iter) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (objective(m1) < objective(m2)) lo = m1;
    else hi = m2;
  }
  double t_star = 0.5 * (lo + hi);
  double best = objective(t_star);
  for (double t : {0.0, 1.0}) {
    const double v = objective(t);
    if (v > best) {
      best = v;
      t_star = t;
    }
  }
  return {std::max(best, 0.0), t_star};
}

std::pair<PoissonProfile, PoissonProfile> profiles_for_test(
    const SimpleApproximation& approx, double lambda, double p, double q) {
  PoissonProfile null_profile, alt_profile;
  for (const SimpleApproximation::Level& level : approx.levels) {
    const double vol = level.volume();
    const double c = level.value;
    const double base = lambda * vol;
    null_profile.entries.push_back(base * p * c);
    null_profile.entries.push_back(base * (1.0 - p * c));
    null_profile.entries.push_back(base * q * c);
    null_profile.entries.push_back(base * (1.0 - q * c));
    alt_profile.entries.push_back(base * q * c);
    alt_profile.entries.push_back(base * (1.0 - q * c));
    alt_profile.entries.push_back(base * p * c);
    alt_profile.entries.push_back(base * (1.0 - p * c));
  }
  return {null_profile, alt_profile};
}

double init_exponent(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw std::invalid_argument("init_exponent: p, q must be in (0, 1)");
  const double s = p + q, d = p - q;
  const double branch_diff = s * s / 4.0 * std::log(s * s / (p * q)) + 2.0 * d * d;
  const double branch_same = d * d - s * s * std::log(2.0 * (p * p + q * q) / (s * s));
  return std::min(branch_diff, branch_same);
}

double init_exponent_proof(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw std::invalid_argument("init_exponent_proof: p, q must be in (0, 1)");
  const double s = p + q, d = p - q;
  // Exponent coefficients of lambda*I as the two tail propositions derive
  // them: cross-community and same-community respectively.
  const double branch_diff = s * s / 4.0 * std::log(s * s / (4.0 * p * q)) + d * d / 2.0;
  const double branch_same = (d * d - s * s * std::log(2.0 * (p * p + q * q) / (s * s))) / 4.0;
  return std::min(branch_diff, branch_same);
}

ThresholdReport derived_constants(double lambda, const Kernel& kernel, double p,
                                  double q, double tol) {
  if (!(lambda > 0.0)) throw std::invalid_argument("derived_constants: lambda must be > 0");
  ThresholdReport report;
  report.lambda = lambda;
  report.p = p;
  report.q = q;
  report.kappa = kernel.kappa();
  report.epsilon = kernel.epsilon();
  report.lambda_kappa = lambda * kernel.kappa();
  report.info = info_metric(kernel, p, q, tol);
  report.lambda_info = lambda * report.info;
  report.init_exponent =
      (p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0) ? init_exponent(p, q)
                                                 : std::numeric_limits<double>::quiet_NaN();

  const double lk = report.lambda_kappa;
  report.delta_cap = lk + 1.0 + std::sqrt(2.0 * lk + 1.0);

  if (lk > 1.0 + 1e-12) {
    // h(x) = x (log x - log lk) + lk - x decreases from lk (x -> 0) to 0
    // (x = lk); bisect h(gamma) = (1 + lk)/2, then delta = lk - gamma.
    const double target = 0.5 * (1.0 + lk);
    auto h = [&](double x) { return x * (std::log(x) - std::log(lk)) + lk - x; };
    double lo = 1e-12, hi = lk;
    for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (h(mid) > target) lo = mid;
      else hi = mid;
    }
    const double gamma = 0.5 * (lo + hi);
    report.delta_low = lk - gamma;
  }

  const double hell = std::sqrt(p) - std::sqrt(q);
  if (report.delta_low && report.epsilon > 0.0 && p != q) {
    report.prop_budget = 10.0 / (4.0 * *report.delta_low * report.epsilon * hell * hell);
  }
  if (std::isfinite(report.init_exponent)) {
    report.c1 = lambda * report.epsilon * report.epsilon * kernel.kappa() *
                report.init_exponent / 4.0;
  }
  if (report.delta_low) {
    report.c2 = *report.delta_low * report.epsilon * hell * hell / 2.0;
  }

  constexpr double kBoundaryTol = 1e-9;
  if (std::fabs(lk - 1.0) <= kBoundaryTol ||
      std::fabs(report.lambda_info - 1.0) <= kBoundaryTol) {
    report.verdict = Verdict::boundary;
  } else if (lk < 1.0) {
    report.verdict = Verdict::impossible_disconnect;
  } else if (report.lambda_info < 1.0) {
    report.verdict = Verdict::impossible_information;
  } else {
    report.verdict = Verdict::recoverable;
  }
  return report;
}

double empty_block_probability(double lambda, double kappa, int n) {
  if (n < 3) throw std::invalid_argument("empty_block_probability: n must be >= 3");
  if (!(lambda > 0.0 && kappa > 0.0))
    throw std::invalid_argument("empty_block_probability: lambda, kappa must be > 0");
  return std::exp(-lambda * kappa * std::log(static_cast<double>(n)));
}

PoissonTail poisson_tail_bounds(double mu, double t) {
  if (!(mu > 0.0)) throw std::invalid_argument("poisson_tail_bounds: mu must be > 0");
  if (!(t > 0.0)) throw std::invalid_argument("poisson_tail_bounds: t must be > 0");
  PoissonTail tail;
  tail.upper = std::exp(-(t - mu) * (t - mu) / (2.0 * t));
  tail.lower = t < mu ? std::exp(-(t * std::log(t / mu) + mu - t)) : 1.0;
  return tail;
}

double binomial_tail_bound(double trials, double mean, double t) {
  if (!(mean > 0.0)) throw std::invalid_argument("binomial_tail_bound: mean must be > 0");
  if (!(t > 0.0)) throw std::invalid_argument("binomial_tail_bound: t must be > 0");
  if (trials < mean) throw std::invalid_argument("binomial_tail_bound: mean cannot exceed trials");
  return std::exp(mean * (t - (1.0 + t) * std::log1p(t)));
}

RenyiBounds renyi_bounds(double p, double q, double epsilon) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw std::invalid_argument("renyi_bounds: p, q must be in (0, 1)");
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("renyi_bounds: epsilon must be in (0, 1]");
  RenyiBounds b;
  b.xi1 = 2.0 * std::log(std::pow(p, 1.5) / std::sqrt(q) +
                         std::pow(1.0 - p * epsilon, 1.5) / std::sqrt(1.0 - q));
  b.xi2 = 2.0 * std::log(std::pow(q, 1.5) / std::sqrt(p) +
                         std::pow(1.0 - q * epsilon, 1.5) / std::sqrt(1.0 - p));
  b.xi3 = -2.0 * std::log(std::sqrt(p * q) * epsilon + std::sqrt((1.0 - p) * (1.0 - q)));
  const double hell = std::sqrt(p) - std::sqrt(q);
  b.xi4 = epsilon * hell * hell;
  return b;
}

}  // namespace gkbm
