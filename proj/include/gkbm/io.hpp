#pragma once

#include <string>

#include <json.hpp>

#include "gkbm/info.hpp"
#include "gkbm/model.hpp"
#include "gkbm/recovery.hpp"

namespace gkbm {

/// Kernel spec grammar:
///   {"shape":"indicator","kappa":1.0}
///   {"shape":"triangular","kappa":...}
///   {"shape":"texp","rate":...,"kappa":...}
///   {"shape":"pwc","pieces":[[left,right,level],...]}
/// An optional "epsilon" field overrides the computed infimum.
nlohmann::json kernel_to_json(const Kernel& kernel);
Kernel kernel_from_json(const nlohmann::json& j);

nlohmann::json params_to_json(const GkbmParams& params);
GkbmParams params_from_json(const nlohmann::json& j);

/// Versioned instance document:
///   {"format_version":1, "params":{...}, "N":..., "locations":[...],
///    "communities":[...], "edges":[[u,v],...]}  with u < v, 0-indexed.
nlohmann::json instance_to_json(const GkbmInstance& inst);
GkbmInstance instance_from_json(const nlohmann::json& j);

nlohmann::json threshold_report_to_json(const ThresholdReport& report);

/// {"flip_canonical":bool, "labels":[...]} . With canonicalize = true the
/// labeling is flipped so its first nonzero entry is +1.
nlohmann::json labeling_to_json(const Labeling& labeling, bool canonicalize);
Labeling labeling_from_json(const nlohmann::json& j);

nlohmann::json runtime_stats_to_json(const RuntimeStats& stats);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gkbm
