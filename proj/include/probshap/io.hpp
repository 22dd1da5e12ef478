#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"
#include "probshap/estimators.hpp"
#include "probshap/experiment.hpp"
#include "probshap/metrics.hpp"

namespace probshap {

inline constexpr const char* kToolName = "probshap";
inline constexpr const char* kToolVersion = "0.1.0";

// 17 significant digits, '.' decimal point, no grouping.
std::string format_double(double value);

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
nlohmann::ordered_json run_to_json(const RunResult& run);
nlohmann::ordered_json metrics_to_json(const MetricsReport& report);

// {tool, version, config, master_seed}
nlohmann::ordered_json provenance(const nlohmann::ordered_json& config, std::uint64_t seed);

// One comment line "# <provenance json>" followed by the
// game,player_0,...,player_{n-1} matrix of per-game means.
void write_per_game_csv(std::ostream& out, const RunResult& run,
                        const nlohmann::ordered_json& prov);

// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace probshap
