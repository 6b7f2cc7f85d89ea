#include "gkbm/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gkbm/harness.hpp"
#include "gkbm/io.hpp"
#include "gkbm/oracle.hpp"
#include "gkbm/recovery.hpp"

namespace gkbm {

namespace {

Kernel parse_kernel_arg(const std::string& text) {
  return kernel_from_json(nlohmann::json::parse(text));
}

void emit_json(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text_file(out_path, j.dump(2) + "\n");
  }
}

struct CliOptions {
  std::uint64_t seed{0};
  double tol{1e-9};
  bool quiet{false};
};

void info_line(const CliOptions& opts, const std::string& message) {
  if (!opts.quiet) std::cerr << message << "\n";
}

int run(int argc, const char* const* argv) {
  CLI::App app{"GKBM sampling, thresholds, and exact-recovery pipeline"};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--seed", opts.seed, "Base seed for all randomness");
  app.add_option("--tol", opts.tol, "Quadrature absolute tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", opts.quiet, "Suppress informational output on stderr");

  // generate
  auto* generate = app.add_subcommand("generate", "Sample a GKBM instance");
  double gen_lambda = 1.0, gen_p = 0.5, gen_q = 0.5;
  int gen_n = 1000;
  std::string gen_kernel = R"({"shape":"indicator","kappa":1.0})";
  std::string gen_out;
  generate->add_option("--lambda", gen_lambda, "Intensity multiplier")->required();
  generate->add_option("--n", gen_n, "Scale parameter")->required();
  generate->add_option("--p", gen_p, "Intra-community probability")->required();
  generate->add_option("--q", gen_q, "Inter-community probability")->required();
  generate->add_option("--kernel", gen_kernel, "Kernel spec JSON");
  generate->add_option("--out", gen_out, "Output file (stdout when omitted)");

  // recover
  auto* recover = app.add_subcommand("recover", "Run the two-phase recovery pipeline");
  std::string rec_in, rec_labels_out;
  bool rec_stats = false;
  recover->add_option("--in", rec_in, "Instance JSON file")->required();
  recover->add_option("--emit-labels", rec_labels_out, "Write labels JSON to this file");
  recover->add_flag("--stats", rec_stats, "Include runtime statistics");

  // threshold
  auto* threshold = app.add_subcommand("threshold", "Compute the threshold report");
  double thr_lambda = 1.0, thr_p = 0.5, thr_q = 0.5;
  std::string thr_kernel = R"({"shape":"indicator","kappa":1.0})";
  threshold->add_option("--lambda", thr_lambda, "Intensity multiplier")->required();
  threshold->add_option("--p", thr_p, "Intra-community probability")->required();
  threshold->add_option("--q", thr_q, "Inter-community probability")->required();
  threshold->add_option("--kernel", thr_kernel, "Kernel spec JSON");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Desk-scale ground-truth references");
  std::string ora_in, ora_mode = "map", ora_labels;
  int ora_node = -1;
  oracle_cmd->add_option("--in", ora_in, "Instance JSON file")->required();
  oracle_cmd->add_option("--mode", ora_mode, "map | component | likelihood")
      ->check(CLI::IsMember({"map", "component", "likelihood"}));
  oracle_cmd->add_option("--node", ora_node, "Node for component mode (-1 = all)");
  oracle_cmd->add_option("--labels", ora_labels, "Labeling JSON for likelihood mode");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo phase-diagram sweep");
  std::string sweep_config, sweep_out, sweep_svg;
  int sweep_workers = 1;
  sweep->add_option("--config", sweep_config, "Experiment config JSON")->required();
  sweep->add_option("--out", sweep_out, "Output CSV path")->required();
  sweep->add_option("--svg", sweep_svg, "Phase-diagram SVG path");
  sweep->add_option("--workers", sweep_workers, "Worker threads")->check(CLI::PositiveNumber);

  // Global flags (--seed, --tol, --quiet) are accepted after a subcommand.
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  if (generate->parsed()) {
    GkbmParams params;
    params.lambda = gen_lambda;
    params.n = gen_n;
    params.p = gen_p;
    params.q = gen_q;
    params.kernel = parse_kernel_arg(gen_kernel);
    params.seed = opts.seed;
    const GkbmInstance inst = sample(params);
    info_line(opts, "sampled N=" + std::to_string(inst.node_count) + " nodes, " +
                        std::to_string(inst.edge_count()) + " edges");
    emit_json(instance_to_json(inst), gen_out);
    return 0;
  }

  if (recover->parsed()) {
    const GkbmInstance inst =
        instance_from_json(nlohmann::json::parse(read_text_file(rec_in)));
    const auto [labels, stats] = full_pipeline(inst, opts.tol);
    nlohmann::json out = labeling_to_json(labels, /*canonicalize=*/true);
    if (rec_stats) out["stats"] = runtime_stats_to_json(stats);
    Labeling truth;
    truth.values.assign(inst.communities.begin(), inst.communities.end());
    const AgreementResult agree = agreement(labels, truth);
    out["agreement"] = {{"flip", agree.flip},
                        {"matched", agree.matched},
                        {"compared", agree.compared},
                        {"exact", agree.matched == inst.node_count &&
                                      agree.compared == inst.node_count}};
    if (!rec_labels_out.empty())
      write_text_file(rec_labels_out,
                      labeling_to_json(labels, /*canonicalize=*/true).dump(2) + "\n");
    emit_json(out, "");
    return 0;
  }

  if (threshold->parsed()) {
    const Kernel kernel = parse_kernel_arg(thr_kernel);
    const ThresholdReport report = derived_constants(thr_lambda, kernel, thr_p, thr_q, opts.tol);
    if (report.epsilon == 0.0) {
      info_line(opts,
                "warning: kernel infimum is 0 on its support; initialization and "
                "propagation guarantees are unavailable (constants omitted)");
    }
    emit_json(threshold_report_to_json(report), "");
    return 0;
  }

  if (oracle_cmd->parsed()) {
    const GkbmInstance inst =
        instance_from_json(nlohmann::json::parse(read_text_file(ora_in)));
    Labeling truth;
    truth.values.assign(inst.communities.begin(), inst.communities.end());
    nlohmann::json out;
    if (ora_mode == "map") {
      const MapResult map = map_estimate(inst);
      out = labeling_to_json(map.labeling, /*canonicalize=*/false);
      out["log_likelihood"] = map.log_likelihood;
      out["tie"] = map.tie;
      const AgreementResult agree = agreement(map.labeling, truth);
      out["matches_truth_up_to_flip"] =
          agree.matched == inst.node_count && agree.compared == inst.node_count;
    } else if (ora_mode == "component") {
      nlohmann::json rows = nlohmann::json::array();
      const int lo = ora_node >= 0 ? ora_node : 0;
      const int hi = ora_node >= 0 ? ora_node + 1 : inst.node_count;
      for (int u = lo; u < hi; ++u) {
        const ComponentMapResult r = component_map(inst, u, truth);
        rows.push_back({{"node", u},
                        {"sign", r.sign},
                        {"tie", r.tie},
                        {"matches_truth", r.sign == truth[u]}});
      }
      out = {{"mode", "component"}, {"results", rows}};
    } else {
      Labeling labels = truth;
      if (!ora_labels.empty())
        labels = labeling_from_json(nlohmann::json::parse(read_text_file(ora_labels)));
      const LikelihoodBreakdown breakdown = log_likelihood_breakdown(inst, labels);
      out = {{"mode", "likelihood"},
             {"log_likelihood", breakdown.log_likelihood},
             {"pair_count", breakdown.per_pair_terms.size()}};
    }
    emit_json(out, "");
    return 0;
  }

  if (sweep->parsed()) {
    ExperimentConfig config =
        config_from_json(nlohmann::json::parse(read_text_file(sweep_config)));
    const std::vector<CellResult> results = run_sweep(config, sweep_workers);
    std::ostringstream csv;
    emit_csv(results, config.metrics, csv);
    write_text_file(sweep_out, csv.str());
    info_line(opts, "wrote " + sweep_out);
    if (!sweep_svg.empty()) {
      std::ostringstream svg;
      emit_svg(results, svg);
      write_text_file(sweep_svg, svg.str());
      info_line(opts, "wrote " + sweep_svg);
    }
    return 0;
  }

  return 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid JSON: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace gkbm
