#pragma once

#include "lcdpf/config.hpp"
#include "lcdpf/harness.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace lcdpf {

nlohmann::json summary_to_json(const ScenarioConfig& cfg, const ScenarioResult& result);
MetricsSummary summary_from_json(const nlohmann::json& j);

nlohmann::json topology_to_json(const Topology& t);

/// Writes results.csv, summary.json and rmse_series.csv into `dir`
/// (created if missing).
void write_results(const std::filesystem::path& dir, const ScenarioConfig& cfg, const ScenarioResult& result);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace lcdpf
