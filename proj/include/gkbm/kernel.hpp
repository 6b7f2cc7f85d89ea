#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gkbm/geometry.hpp"

namespace gkbm {

enum class KernelShape { indicator, triangular, truncated_exponential, piecewise_constant };

/// Constant level on the half-open interval [left, right).
struct KernelPiece {
  double left{0.0};
  double right{0.0};
  double level{0.0};
};

/// Compact-support connection function phi: R+ -> [0, 1] with
///   kappa   = sup{x : phi(x) != 0}
///   epsilon = inf{phi(x) : x in [0, kappa]}.
///
/// Recovery guarantees (Phase I constants) need epsilon > 0, i.e. phi
/// bounded away from 0 on its support. Kernels that vanish at kappa (the
/// triangular shape, gapped piecewise kernels) have epsilon = 0; they can be
/// sampled and run through the pipeline, but the derived constants that
/// divide by epsilon are reported as unavailable.
class Kernel {
 public:
  /// phi(x) = 1{x in [0, kappa]}.
  static Kernel indicator(double kappa);
  /// phi(x) = max(0, 1 - x/kappa).
  static Kernel triangular(double kappa);
  /// phi(x) = exp(-rate * x) on [0, kappa], 0 beyond.
  static Kernel truncated_exponential(double rate, double kappa);
  /// Disjoint constant pieces; gaps inside [0, kappa] evaluate to 0.
  static Kernel piecewise_constant(std::vector<KernelPiece> pieces);

  /// Replaces the computed infimum with a user-supplied value.
  Kernel with_epsilon(double epsilon) const;

  double operator()(double x) const;

  KernelShape shape() const { return shape_; }
  double kappa() const { return kappa_; }
  double epsilon() const { return epsilon_; }
  double rate() const { return rate_; }
  const std::vector<KernelPiece>& pieces() const { return pieces_; }

  /// Integration split points inside [0, kappa] (kinks of phi).
  std::vector<double> breakpoints() const;

  /// inf of phi over [a, b] intersected with [0, kappa]; exact per shape.
  double infimum_on(double a, double b) const;

  /// Compact label used in CSV output, e.g. "indicator(1)".
  std::string describe() const;

 private:
  Kernel() = default;

  KernelShape shape_{KernelShape::indicator};
  double kappa_{1.0};
  double epsilon_{1.0};
  double rate_{0.0};
  std::vector<KernelPiece> pieces_;  // piecewise_constant only, sorted by left
};

/// Simple-function approximation phi_ell = sum_s c_s 1_{Gamma_s} from below.
/// Levels are grouped by distinct value c_s; Gamma_s is the interval union
/// where phi_ell equals c_s (zero-level regions are kept explicitly: they
/// still contribute non-neighbour entries to the Poisson profiles).
struct SimpleApproximation {
  struct Level {
    double value{0.0};
    std::vector<std::pair<double, double>> intervals;
    double volume() const;
  };

  std::vector<Level> levels;
  int ell{0};
  double kappa{0.0};
  double sup_error{0.0};

  double operator()(double x) const;
};

/// Partitions [0, kappa] into ell equal intervals and takes the interval
/// infimum as the level (monotone ladder from below). Piecewise-constant
/// kernels with at most ell pieces are returned as themselves (error 0).
SimpleApproximation approximate(const Kernel& kernel, int ell);

/// psi_n(x, y) = phi((n / log n) * d(x, y)). Requires n >= 3.
double psi_n(const Kernel& kernel, int n, TorusPoint x, TorusPoint y);

/// kappa * log(n) / n, the maximum distance at which an edge is possible.
double scaled_support_radius(const Kernel& kernel, int n);

}  // namespace gkbm
