#pragma once

#include <string>

#include <json.hpp>

#include "arrowlab/scenario.hpp"

namespace arrowlab {

/// Parses and validates a JSON scenario config. Unknown keys are rejected
/// and all defaults are resolved, so serializing the result is canonical.
ScenarioConfig parse_config(const std::string& text);

nlohmann::ordered_json config_to_json(const ScenarioConfig& cfg);

/// Canonical config text (defaults resolved, fixed key order) and its FNV-1a
/// hash; every artifact is stamped with the hash + seed that produced it.
std::string canonical_config_text(const ScenarioConfig& cfg);
std::string config_hash_hex(const ScenarioConfig& cfg);

/// CSV with header t,S_pos,S_vel,cv,dist_pos,dist_vel and one row per
/// sample, 17 significant digits throughout (reproducible diffs).
std::string write_trace_csv(const EntropyTrace& trace);
nlohmann::ordered_json trace_to_json(const EntropyTrace& trace);

std::string write_trajectory_csv(const TrajectoryTrace& traj);
TrajectoryTrace read_trajectory_csv(const std::string& text);

nlohmann::ordered_json report_to_json(const ScenarioReport& report);
std::string report_summary_text(const ScenarioReport& report);

/// Fixed 17-significant-digit formatting used by every text artifact.
std::string format_g17(double v);

}  // namespace arrowlab
