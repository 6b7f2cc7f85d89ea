#include "gkbm/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gkbm {

nlohmann::json kernel_to_json(const Kernel& kernel) {
  nlohmann::json j;
  switch (kernel.shape()) {
    case KernelShape::indicator:
      j = {{"shape", "indicator"}, {"kappa", kernel.kappa()}};
      break;
    case KernelShape::triangular:
      j = {{"shape", "triangular"}, {"kappa", kernel.kappa()}};
      break;
    case KernelShape::truncated_exponential:
      j = {{"shape", "texp"}, {"rate", kernel.rate()}, {"kappa", kernel.kappa()}};
      break;
    case KernelShape::piecewise_constant: {
      nlohmann::json pieces = nlohmann::json::array();
      for (const KernelPiece& piece : kernel.pieces())
        pieces.push_back({piece.left, piece.right, piece.level});
      j = {{"shape", "pwc"}, {"pieces", pieces}};
      break;
    }
  }
  return j;
}

Kernel kernel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("shape"))
    throw std::invalid_argument("kernel: expected an object with a \"shape\" field");
  const std::string shape = j.at("shape").get<std::string>();
  Kernel kernel = [&] {
    if (shape == "indicator") return Kernel::indicator(j.at("kappa").get<double>());
    if (shape == "triangular") return Kernel::triangular(j.at("kappa").get<double>());
    if (shape == "texp")
      return Kernel::truncated_exponential(j.at("rate").get<double>(),
                                           j.at("kappa").get<double>());
    if (shape == "pwc") {
      std::vector<KernelPiece> pieces;
      for (const auto& row : j.at("pieces")) {
        if (!row.is_array() || row.size() != 3)
          throw std::invalid_argument("kernel: pwc pieces must be [left,right,level] triples");
        pieces.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
      }
      return Kernel::piecewise_constant(std::move(pieces));
    }
    throw std::invalid_argument("kernel: unknown shape \"" + shape + "\"");
  }();
  if (j.contains("epsilon")) kernel = kernel.with_epsilon(j.at("epsilon").get<double>());
  return kernel;
}

nlohmann::json params_to_json(const GkbmParams& params) {
  return {{"lambda", params.lambda}, {"n", params.n},       {"p", params.p},
          {"q", params.q},           {"kernel", kernel_to_json(params.kernel)},
          {"seed", params.seed}};
}

GkbmParams params_from_json(const nlohmann::json& j) {
  GkbmParams params;
  params.lambda = j.at("lambda").get<double>();
  params.n = j.at("n").get<int>();
  params.p = j.at("p").get<double>();
  params.q = j.at("q").get<double>();
  params.kernel = kernel_from_json(j.at("kernel"));
  params.seed = j.value("seed", std::uint64_t{0});
  params.validate();
  return params;
}

nlohmann::json instance_to_json(const GkbmInstance& inst) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["params"] = params_to_json(inst.params);
  j["N"] = inst.node_count;
  nlohmann::json locations = nlohmann::json::array();
  for (const TorusPoint& point : inst.locations) locations.push_back(point.coordinate);
  j["locations"] = std::move(locations);
  nlohmann::json communities = nlohmann::json::array();
  for (std::int8_t c : inst.communities) communities.push_back(static_cast<int>(c));
  j["communities"] = std::move(communities);
  nlohmann::json edges = nlohmann::json::array();
  for (int u = 0; u < inst.node_count; ++u) {
    for (std::int32_t v : inst.neighbors[u]) {
      if (u < v) edges.push_back({u, v});
    }
  }
  j["edges"] = std::move(edges);
  return j;
}

GkbmInstance instance_from_json(const nlohmann::json& j) {
  const int version = j.value("format_version", 0);
  if (version != 1)
    throw std::invalid_argument("instance: unsupported format_version");
  GkbmInstance inst;
  inst.params = params_from_json(j.at("params"));
  const int n_nodes = j.at("N").get<int>();
  const auto& locations = j.at("locations");
  const auto& communities = j.at("communities");
  if (static_cast<int>(locations.size()) != n_nodes ||
      static_cast<int>(communities.size()) != n_nodes)
    throw std::invalid_argument("instance: N does not match array lengths");
  inst.locations.reserve(n_nodes);
  for (const auto& coord : locations)
    inst.locations.push_back(TorusPoint::from(coord.get<double>()));
  inst.communities.reserve(n_nodes);
  for (const auto& c : communities) {
    const int value = c.get<int>();
    if (value != 1 && value != -1)
      throw std::invalid_argument("instance: communities must be +-1");
    inst.communities.push_back(static_cast<std::int8_t>(value));
  }
  inst.neighbors.assign(n_nodes, {});
  for (const auto& edge : j.at("edges")) {
    if (!edge.is_array() || edge.size() != 2)
      throw std::invalid_argument("instance: edges must be [u,v] pairs");
    const int u = edge[0].get<int>();
    const int v = edge[1].get<int>();
    if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes || u == v)
      throw std::invalid_argument("instance: edge endpoints out of range");
    inst.neighbors[u].push_back(v);
    inst.neighbors[v].push_back(u);
  }
  inst.rebuild_index();
  return inst;
}

nlohmann::json threshold_report_to_json(const ThresholdReport& report) {
  nlohmann::json j;
  j["lambda"] = report.lambda;
  j["p"] = report.p;
  j["q"] = report.q;
  j["kappa"] = report.kappa;
  j["epsilon"] = report.epsilon;
  j["lambda_kappa"] = report.lambda_kappa;
  j["info"] = report.info;
  j["lambda_info"] = report.lambda_info;
  if (std::isfinite(report.init_exponent)) j["init_exponent"] = report.init_exponent;
  else j["init_exponent"] = nullptr;
  j["delta_cap"] = report.delta_cap;
  j["delta_low"] = report.delta_low ? nlohmann::json(*report.delta_low) : nlohmann::json();
  j["prop_budget"] = report.prop_budget ? nlohmann::json(*report.prop_budget) : nlohmann::json();
  j["c1"] = report.c1 ? nlohmann::json(*report.c1) : nlohmann::json();
  j["c2"] = report.c2 ? nlohmann::json(*report.c2) : nlohmann::json();
  j["verdict"] = to_string(report.verdict);
  return j;
}

nlohmann::json labeling_to_json(const Labeling& labeling, bool canonicalize) {
  int flip = +1;
  if (canonicalize) {
    for (std::int8_t v : labeling.values) {
      if (v != 0) {
        flip = v > 0 ? +1 : -1;
        break;
      }
    }
  }
  nlohmann::json labels = nlohmann::json::array();
  for (std::int8_t v : labeling.values) labels.push_back(static_cast<int>(v) * flip);
  return {{"flip_canonical", canonicalize}, {"labels", std::move(labels)}};
}

Labeling labeling_from_json(const nlohmann::json& j) {
  const auto& labels = j.at("labels");
  Labeling out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int value = labels[i].get<int>();
    if (value < -1 || value > 1)
      throw std::invalid_argument("labels must be in {-1, 0, +1}");
    out[i] = static_cast<std::int8_t>(value);
  }
  return out;
}

nlohmann::json runtime_stats_to_json(const RuntimeStats& stats) {
  return {{"wall_seconds", stats.wall_seconds},
          {"edge_count", stats.edge_count},
          {"candidate_pairs", stats.candidate_pairs},
          {"init_ops", stats.init_ops},
          {"propagate_ops", stats.propagate_ops},
          {"refine_ops", stats.refine_ops},
          {"total_ops", stats.ops()}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace gkbm
