#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gkbm/info.hpp"
#include "gkbm/model.hpp"

namespace gkbm {

enum class Metric {
  exact_rate,
  agreement_fraction,
  phase1_error_count,
  disconnect_rate,
  runtime,
  edge_count,
};

std::string to_string(Metric m);
Metric metric_from_string(const std::string& name);

struct ExperimentConfig {
  std::vector<double> lambdas;
  std::vector<double> ps;
  std::vector<double> qs;
  std::vector<Kernel> kernels;
  std::vector<int> ns;
  int seeds_per_cell{1};
  std::uint64_t base_seed{0};
  double tol{1e-9};
  std::vector<Metric> metrics;

  void validate() const;  // non-empty grid, seeds >= 1, metrics non-empty
};

ExperimentConfig config_from_json(const nlohmann::json& j);

struct MetricStat {
  double mean{0.0};
  double se{0.0};  // sample SD / sqrt(seeds); 0 when seeds == 1
};

struct CellResult {
  double lambda{0.0};
  double p{0.0};
  double q{0.0};
  Kernel kernel{Kernel::indicator(1.0)};
  int n{0};
  double lambda_kappa{0.0};
  double lambda_info{0.0};
  int seeds{0};
  std::uint64_t seed_lo{0};
  std::uint64_t seed_hi{0};
  std::vector<std::pair<Metric, MetricStat>> stats;
};

/// Deterministic per-cell hash; the instance seed for (cell, k) is
/// mix64(cell_hash ^ mix64(base_seed + k)), so results are independent of
/// execution order and worker count.
std::uint64_t cell_hash(double lambda, double p, double q, const Kernel& kernel, int n);

/// Runs the full grid; per cell and seed: sample -> phase1 -> refine ->
/// flip-aware agreement against the ground truth. Cells are ordered
/// (lambda, p, q, kernel, n) with n fastest. Per-cell failures are recorded
/// on stderr and skipped; the sweep continues.
std::vector<CellResult> run_sweep(const ExperimentConfig& config, int workers = 1);

/// Fraction of location processes with at least two empty blocks at cyclic
/// index gap >= 2 (the disconnection certificate of the impossibility
/// argument). Location-only: no edges are sampled.
double disconnect_experiment(double lambda, const Kernel& kernel, int n,
                             int trials, std::uint64_t seed);

/// Analytic lower bound 1 - e^(-gamma b) (1 + 2 b gamma) with
/// gamma = n^(-lambda kappa), b = ceil(n / (kappa log n)).
double disconnect_lower_bound(double lambda, double kappa, int n);

/// True when the empty-block pattern disconnects the torus: two empty
/// blocks at cyclic gap >= 2.
bool disconnecting_pattern(const std::vector<int>& block_counts);

/// Fixed column order: lambda,p,q,kernel,n,lambda_kappa,lambda_info,seeds,
/// seed_lo,seed_hi, then <metric>_mean,<metric>_se per requested metric.
void emit_csv(const std::vector<CellResult>& results,
              const std::vector<Metric>& metrics, std::ostream& out);

/// Phase diagram: x = lambda * I_phi, y = exact_rate, one polyline per n,
/// vertical reference line at x = 1. Requires the exact_rate metric.
void emit_svg(const std::vector<CellResult>& results, std::ostream& out);

}  // namespace gkbm
