#pragma once

#include <string>
#include <vector>

#include "cnhaven/pipeline_sim.hpp"

namespace cnhaven {

/// Nested-object JSON for a config. Missing keys keep their defaults; unknown
/// keys and wrong types throw ConfigInvalid.
std::string config_to_json(const PipelineConfig& config, int indent = -1);
PipelineConfig config_from_json(const std::string& text);
PipelineConfig load_config(const std::string& path);

/// A grid file is either an array of configs or {"base": {...}, "vary": {"a.b": [..], ...}}
/// expanded as a cartesian product in key order.
std::vector<PipelineConfig> grid_from_json(const std::string& text);
std::vector<PipelineConfig> load_grid(const std::string& path);

std::string report_to_json(const SimReport& report, int indent = -1);
std::string bounds_to_json(const TheoreticalBounds& bounds, int indent = -1);
std::string sweep_to_json(const std::vector<SweepResult>& results, int indent = -1);
std::string sweep_to_csv(const std::vector<SweepResult>& results);

} // namespace cnhaven
