#include "gkbm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "gkbm/io.hpp"
#include "gkbm/recovery.hpp"
#include "gkbm/rng.hpp"

namespace gkbm {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::exact_rate: return "exact_rate";
    case Metric::agreement_fraction: return "agreement_fraction";
    case Metric::phase1_error_count: return "phase1_error_count";
    case Metric::disconnect_rate: return "disconnect_rate";
    case Metric::runtime: return "runtime";
    case Metric::edge_count: return "edge_count";
  }
  return "unknown";
}

Metric metric_from_string(const std::string& name) {
  for (Metric m : {Metric::exact_rate, Metric::agreement_fraction,
                   Metric::phase1_error_count, Metric::disconnect_rate,
                   Metric::runtime, Metric::edge_count}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown metric \"" + name + "\"");
}

void ExperimentConfig::validate() const {
  if (lambdas.empty() || ps.empty() || qs.empty() || kernels.empty() || ns.empty())
    throw std::invalid_argument("ExperimentConfig: grid must be non-empty");
  if (seeds_per_cell < 1)
    throw std::invalid_argument("ExperimentConfig: seeds_per_cell must be >= 1");
  if (metrics.empty())
    throw std::invalid_argument("ExperimentConfig: metrics must be non-empty");
  if (!(tol > 0.0)) throw std::invalid_argument("ExperimentConfig: tol must be > 0");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  config.lambdas = j.at("lambdas").get<std::vector<double>>();
  config.ps = j.at("ps").get<std::vector<double>>();
  config.qs = j.at("qs").get<std::vector<double>>();
  config.ns = j.at("ns").get<std::vector<int>>();
  for (const auto& kj : j.at("kernels")) config.kernels.push_back(kernel_from_json(kj));
  config.seeds_per_cell = j.value("seeds_per_cell", 1);
  config.base_seed = j.value("base_seed", std::uint64_t{0});
  config.tol = j.value("tol", 1e-9);
  for (const auto& name : j.at("metrics"))
    config.metrics.push_back(metric_from_string(name.get<std::string>()));
  config.validate();
  return config;
}

std::uint64_t cell_hash(double lambda, double p, double q, const Kernel& kernel, int n) {
  auto fold = [](std::uint64_t h, std::uint64_t v) { return mix64(h ^ mix64(v)); };
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  h = fold(h, std::bit_cast<std::uint64_t>(lambda));
  h = fold(h, std::bit_cast<std::uint64_t>(p));
  h = fold(h, std::bit_cast<std::uint64_t>(q));
  h = fold(h, static_cast<std::uint64_t>(n));
  h = fold(h, static_cast<std::uint64_t>(kernel.shape()));
  h = fold(h, std::bit_cast<std::uint64_t>(kernel.kappa()));
  h = fold(h, std::bit_cast<std::uint64_t>(kernel.rate()));
  for (const KernelPiece& piece : kernel.pieces()) {
    h = fold(h, std::bit_cast<std::uint64_t>(piece.left));
    h = fold(h, std::bit_cast<std::uint64_t>(piece.right));
    h = fold(h, std::bit_cast<std::uint64_t>(piece.level));
  }
  return h;
}

namespace {

struct Cell {
  double lambda, p, q;
  Kernel kernel;
  int n;
  std::uint64_t hash;
};

struct RunOutcome {
  bool ok{false};
  double exact{0.0};
  double fraction{0.0};
  double phase1_errors{0.0};
  double disconnect{0.0};
  double runtime{0.0};
  double edges{0.0};
};

RunOutcome run_once(const Cell& cell, std::uint64_t instance_seed, double tol,
                    bool needs_pipeline) {
  GkbmParams params;
  params.lambda = cell.lambda;
  params.n = cell.n;
  params.p = cell.p;
  params.q = cell.q;
  params.kernel = cell.kernel;
  params.seed = instance_seed;
  const GkbmInstance inst = sample(params);

  RunOutcome out;
  out.ok = true;
  out.edges = static_cast<double>(inst.edge_count());
  std::vector<int> counts(inst.partition.block_count(), 0);
  for (int b : inst.node_block) ++counts[b];
  out.disconnect = disconnecting_pattern(counts) ? 1.0 : 0.0;

  if (!needs_pipeline) return out;

  RuntimeStats stats;
  const auto t0 = std::chrono::steady_clock::now();
  const Labeling initial = phase1(inst, tol, &stats);
  const Labeling final_labels = refine(inst, initial, &stats);
  const auto t1 = std::chrono::steady_clock::now();
  out.runtime = std::chrono::duration<double>(t1 - t0).count();

  Labeling truth;
  truth.values.assign(inst.communities.begin(), inst.communities.end());
  const AgreementResult final_agree = agreement(final_labels, truth);
  out.exact = (final_agree.matched == inst.node_count &&
               final_agree.compared == inst.node_count)
                  ? 1.0
                  : 0.0;
  out.fraction = inst.node_count > 0
                     ? static_cast<double>(final_agree.matched) / inst.node_count
                     : 1.0;
  const AgreementResult initial_agree = agreement(initial, truth);
  out.phase1_errors = static_cast<double>(inst.node_count - initial_agree.matched);
  if (inst.node_count == 0) out.exact = 1.0;
  return out;
}

MetricStat stat_of(const std::vector<double>& xs) {
  MetricStat s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / (xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
  }
  return s;
}

// Library-independent float formatting: shortest representation that
// round-trips, so CSV bytes are identical across platforms.
std::string format_double(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

std::vector<CellResult> run_sweep(const ExperimentConfig& config, int workers) {
  config.validate();
  if (workers < 1) workers = 1;

  std::vector<Cell> cells;
  for (double lambda : config.lambdas)
    for (double p : config.ps)
      for (double q : config.qs)
        for (const Kernel& kernel : config.kernels)
          for (int n : config.ns)
            cells.push_back({lambda, p, q, kernel, n,
                             cell_hash(lambda, p, q, kernel, n)});

  const bool needs_pipeline =
      std::any_of(config.metrics.begin(), config.metrics.end(), [](Metric m) {
        return m == Metric::exact_rate || m == Metric::agreement_fraction ||
               m == Metric::phase1_error_count || m == Metric::runtime;
      });

  const int seeds = config.seeds_per_cell;
  const std::size_t total = cells.size() * static_cast<std::size_t>(seeds);
  std::vector<RunOutcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= total) return;
      const Cell& cell = cells[task / seeds];
      const std::uint64_t k = task % seeds;
      const std::uint64_t instance_seed = mix64(cell.hash ^ mix64(config.base_seed + k));
      try {
        outcomes[task] = run_once(cell, instance_seed, config.tol, needs_pipeline);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "sweep: cell (lambda=" << cell.lambda << ", p=" << cell.p
                  << ", q=" << cell.q << ", n=" << cell.n << ") seed " << k
                  << " failed: " << e.what() << "\n";
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::vector<CellResult> results;
  results.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    CellResult result;
    result.lambda = cell.lambda;
    result.p = cell.p;
    result.q = cell.q;
    result.kernel = cell.kernel;
    result.n = cell.n;
    result.lambda_kappa = cell.lambda * cell.kernel.kappa();
    result.lambda_info = cell.lambda * info_metric(cell.kernel, cell.p, cell.q, config.tol);
    result.seeds = seeds;
    result.seed_lo = config.base_seed;
    result.seed_hi = config.base_seed + seeds - 1;

    std::map<Metric, std::vector<double>> samples;
    for (int k = 0; k < seeds; ++k) {
      const RunOutcome& out = outcomes[c * seeds + k];
      if (!out.ok) continue;
      samples[Metric::exact_rate].push_back(out.exact);
      samples[Metric::agreement_fraction].push_back(out.fraction);
      samples[Metric::phase1_error_count].push_back(out.phase1_errors);
      samples[Metric::disconnect_rate].push_back(out.disconnect);
      samples[Metric::runtime].push_back(out.runtime);
      samples[Metric::edge_count].push_back(out.edges);
    }
    for (Metric m : config.metrics) {
      result.stats.emplace_back(m, stat_of(samples[m]));
    }
    results.push_back(std::move(result));
  }
  return results;
}

double disconnect_experiment(double lambda, const Kernel& kernel, int n,
                             int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("disconnect_experiment: trials must be >= 1");
  const BlockPartition partition = BlockPartition::build(n, kernel.kappa());
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 count_rng = substream(seed, stream::experiment, static_cast<std::uint64_t>(t), 0);
    SplitMix64 loc_rng = substream(seed, stream::experiment, static_cast<std::uint64_t>(t), 1);
    const std::int64_t n_nodes = poisson(count_rng, lambda * n);
    std::vector<int> counts(partition.block_count(), 0);
    for (std::int64_t i = 0; i < n_nodes; ++i) {
      ++counts[partition.block_of(TorusPoint::from(uniform01(loc_rng)))];
    }
    if (disconnecting_pattern(counts)) ++hits;
  }
  return static_cast<double>(hits) / trials;
}

double disconnect_lower_bound(double lambda, double kappa, int n) {
  const double gamma = empty_block_probability(lambda, kappa, n);
  const double b = std::ceil(n / (kappa * std::log(static_cast<double>(n))));
  return 1.0 - std::exp(-gamma * b) * (1.0 + 2.0 * b * gamma);
}

bool disconnecting_pattern(const std::vector<int>& block_counts) {
  const int b = static_cast<int>(block_counts.size());
  std::vector<int> empties;
  for (int i = 0; i < b; ++i) {
    if (block_counts[i] == 0) empties.push_back(i);
  }
  for (std::size_t i = 0; i < empties.size(); ++i) {
    for (std::size_t j = i + 1; j < empties.size(); ++j) {
      const int gap = std::min(empties[j] - empties[i], b - (empties[j] - empties[i]));
      if (gap >= 2) return true;
    }
  }
  return false;
}

void emit_csv(const std::vector<CellResult>& results,
              const std::vector<Metric>& metrics, std::ostream& out) {
  if (results.empty()) throw std::invalid_argument("emit_csv: no results");
  if (metrics.empty()) throw std::invalid_argument("emit_csv: no metrics selected");
  out << "lambda,p,q,kernel,n,lambda_kappa,lambda_info,seeds,seed_lo,seed_hi";
  for (Metric m : metrics) {
    out << "," << to_string(m) << "_mean," << to_string(m) << "_se";
  }
  out << "\n";
  for (const CellResult& cell : results) {
    out << format_double(cell.lambda) << "," << format_double(cell.p) << ","
        << format_double(cell.q) << "," << cell.kernel.describe() << "," << cell.n
        << "," << format_double(cell.lambda_kappa) << ","
        << format_double(cell.lambda_info) << "," << cell.seeds << ","
        << cell.seed_lo << "," << cell.seed_hi;
    for (Metric m : metrics) {
      const auto it = std::find_if(cell.stats.begin(), cell.stats.end(),
                                   [&](const auto& pair) { return pair.first == m; });
      if (it == cell.stats.end()) throw std::runtime_error("emit_csv: metric missing from results");
      out << "," << format_double(it->second.mean) << "," << format_double(it->second.se);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("emit_csv: write failed");
}

void emit_svg(const std::vector<CellResult>& results, std::ostream& out) {
  if (results.empty()) throw std::invalid_argument("emit_svg: no results");

  // Collect (x = lambda_info, y = exact_rate) series per n.
  std::map<int, std::vector<std::pair<double, double>>> series;
  double x_max = 1.0;
  for (const CellResult& cell : results) {
    const auto it = std::find_if(cell.stats.begin(), cell.stats.end(), [](const auto& pair) {
      return pair.first == Metric::exact_rate;
    });
    if (it == cell.stats.end())
      throw std::invalid_argument("emit_svg: results lack the exact_rate metric");
    series[cell.n].emplace_back(cell.lambda_info, it->second.mean);
    x_max = std::max(x_max, cell.lambda_info);
  }
  x_max *= 1.05;

  const double width = 640.0, height = 480.0;
  const double ml = 60.0, mr = 20.0, mt = 20.0, mb = 50.0;
  auto px = [&](double x) { return ml + x / x_max * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - y * (height - mt - mb); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
      << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  // Axes.
  out << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(x_max)
      << "\" y2=\"" << py(0) << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0)
      << "\" y2=\"" << py(1) << "\" stroke=\"black\"/>\n";
  out << "  <text x=\"" << 0.5 * (px(0) + px(x_max)) << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-size=\"14\">lambda * I_phi(p,q)</text>\n";
  out << "  <text x=\"15\" y=\"" << 0.5 * (py(0) + py(1))
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 15 "
      << 0.5 * (py(0) + py(1)) << ")\">exact recovery rate</text>\n";
  // Threshold line at lambda * I = 1.
  out << "  <line x1=\"" << px(1.0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1.0)
      << "\" y2=\"" << py(1) << "\" stroke=\"red\" stroke-dasharray=\"6 3\"/>\n";
  out << "  <text x=\"" << px(1.0) + 4 << "\" y=\"" << py(1) + 12
      << "\" font-size=\"12\" fill=\"red\">threshold</text>\n";

  const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                           "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  int color = 0;
  for (auto& [n, points] : series) {
    std::sort(points.begin(), points.end());
    out << "  <polyline fill=\"none\" stroke=\"" << palette[color % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : points) out << px(x) << "," << py(y) << " ";
    out << "\"/>\n";
    out << "  <text x=\"" << width - mr - 70 << "\" y=\"" << mt + 16 * (color + 1)
        << "\" font-size=\"12\" fill=\"" << palette[color % 8] << "\">n = " << n
        << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("emit_svg: write failed");
}

}  // namespace gkbm
