#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gkbm/cli.hpp"
#include "gkbm/io.hpp"
#include "gkbm/recovery.hpp"
#include "test_support.hpp"

using namespace gkbm;

namespace {

/// Runs cli_main in-process with stdout captured.
struct CliRun {
  int exit_code;
  std::string out;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("gkbm");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  const int code = cli_main(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  return {code, captured.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("threshold subcommand emits the report") {
  const CliRun run = run_cli({"threshold", "--lambda", "2", "--p", "0.9", "--q", "0.1",
                              "--kernel", R"({"shape":"indicator","kappa":1})", "--quiet"});
  REQUIRE(run.exit_code == 0);
  const auto j = nlohmann::json::parse(run.out);
  CHECK(j.at("lambda_info").get<double>() == doctest::Approx(1.6).epsilon(1e-9));
  // The CLI value must equal the library call.
  const ThresholdReport direct = derived_constants(2.0, Kernel::indicator(1.0), 0.9, 0.1);
  CHECK(j.at("lambda_info").get<double>() == doctest::Approx(direct.lambda_info).epsilon(1e-15));
  CHECK(j.at("verdict").get<std::string>() == "recoverable");
}

TEST_CASE("generate then recover round-trips through JSON") {
  const std::string inst_path = temp_path("gkbm_test_instance.json");
  const CliRun gen = run_cli({"generate", "--lambda", "2", "--n", "800", "--p", "0.9",
                              "--q", "0.1", "--seed", "42", "--quiet", "--out", inst_path});
  REQUIRE(gen.exit_code == 0);

  const CliRun rec = run_cli({"recover", "--in", inst_path, "--stats", "--quiet"});
  REQUIRE(rec.exit_code == 0);
  const auto j = nlohmann::json::parse(rec.out);
  REQUIRE(j.contains("labels"));
  REQUIRE(j.contains("stats"));

  // The CLI path must reproduce the in-memory pipeline exactly.
  GkbmParams params;
  params.lambda = 2.0;
  params.n = 800;
  params.p = 0.9;
  params.q = 0.1;
  params.kernel = Kernel::indicator(1.0);
  params.seed = 42;
  const GkbmInstance inst = sample(params);
  const auto [labels, stats] = full_pipeline(inst);
  const nlohmann::json expected = labeling_to_json(labels, /*canonicalize=*/true);
  CHECK(j.at("labels") == expected.at("labels"));
  CHECK(j.at("stats").at("edge_count").get<std::size_t>() == inst.edge_count());
  std::remove(inst_path.c_str());
}

TEST_CASE("generate is deterministic in the seed") {
  const std::string path_a = temp_path("gkbm_test_a.json");
  const std::string path_b = temp_path("gkbm_test_b.json");
  REQUIRE(run_cli({"generate", "--lambda", "1", "--n", "300", "--p", "0.8", "--q", "0.2",
                   "--seed", "7", "--quiet", "--out", path_a})
              .exit_code == 0);
  REQUIRE(run_cli({"generate", "--lambda", "1", "--n", "300", "--p", "0.8", "--q", "0.2",
                   "--seed", "7", "--quiet", "--out", path_b})
              .exit_code == 0);
  CHECK(read_text_file(path_a) == read_text_file(path_b));
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

TEST_CASE("oracle subcommand modes") {
  const std::string inst_path = temp_path("gkbm_test_small.json");
  // Small instance so the exhaustive MAP is feasible.
  REQUIRE(run_cli({"generate", "--lambda", "1", "--n", "10", "--p", "0.9", "--q", "0.1",
                   "--seed", "3", "--quiet", "--out", inst_path})
              .exit_code == 0);
  const CliRun map = run_cli({"oracle", "--in", inst_path, "--mode", "map", "--quiet"});
  REQUIRE(map.exit_code == 0);
  CHECK(nlohmann::json::parse(map.out).contains("log_likelihood"));

  const CliRun comp = run_cli({"oracle", "--in", inst_path, "--mode", "component", "--quiet"});
  REQUIRE(comp.exit_code == 0);
  CHECK(nlohmann::json::parse(comp.out).at("results").is_array());

  const CliRun lik = run_cli({"oracle", "--in", inst_path, "--mode", "likelihood", "--quiet"});
  REQUIRE(lik.exit_code == 0);
  CHECK(nlohmann::json::parse(lik.out).contains("log_likelihood"));
  std::remove(inst_path.c_str());
}

TEST_CASE("sweep subcommand writes csv and svg") {
  const std::string cfg_path = temp_path("gkbm_test_cfg.json");
  const std::string csv_path = temp_path("gkbm_test_out.csv");
  const std::string svg_path = temp_path("gkbm_test_out.svg");
  write_text_file(cfg_path, R"({
    "lambdas": [2.0], "ps": [0.9], "qs": [0.1], "ns": [400],
    "kernels": [{"shape":"indicator","kappa":1.0}],
    "seeds_per_cell": 2, "base_seed": 3,
    "metrics": ["exact_rate", "edge_count"]
  })");
  const CliRun run = run_cli({"sweep", "--config", cfg_path, "--out", csv_path,
                              "--svg", svg_path, "--workers", "2", "--quiet"});
  REQUIRE(run.exit_code == 0);
  const std::string csv = read_text_file(csv_path);
  CHECK(csv.find("exact_rate_mean") != std::string::npos);
  CHECK(gkbm::test::xml_well_formed(read_text_file(svg_path)));
  std::remove(cfg_path.c_str());
  std::remove(csv_path.c_str());
  std::remove(svg_path.c_str());
}

TEST_CASE("validation failures exit with code 1") {
  CHECK(run_cli({"threshold", "--p", "0.9", "--q", "0.1"}).exit_code == 1);  // missing --lambda
  CHECK(run_cli({"threshold", "--lambda", "2", "--p", "0.9", "--q", "0.1",
                 "--no-such-flag"})
            .exit_code == 1);
  CHECK(run_cli({"threshold", "--lambda", "2", "--p", "0.9", "--q", "0.1", "--kernel",
                 R"({"shape":"heptagon"})"})
            .exit_code == 1);
  CHECK(run_cli({}).exit_code == 1);  // a subcommand is required
}

TEST_CASE("runtime failures exit with code 2") {
  CHECK(run_cli({"recover", "--in", temp_path("gkbm_does_not_exist.json")}).exit_code == 2);
}
