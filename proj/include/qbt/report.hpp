#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbt/analysis.hpp"
#include "qbt/models.hpp"

namespace qbt {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::string config_path;
  ModelConfig config;
  std::uint64_t seed = 1;
  std::vector<std::string> outputs;
  std::optional<double> wall_time;  // seconds; omitted unless requested
};

nlohmann::json complex_json(Complex z);
nlohmann::json to_json(const ModelConfig& cfg);
nlohmann::json to_json(const RunManifest& m);
nlohmann::json to_json(const GreenReport& r);
nlohmann::json to_json(const KreinReport& r);
nlohmann::json to_json(const TraceReport& r, double tol);
nlohmann::json to_json(const DecayReport& r);

// Columns k, s_k, level; one row per singular value of every level.
void write_decay_csv(const DecayReport& r, std::ostream& out);

}  // namespace qbt
