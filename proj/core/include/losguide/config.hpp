#pragma once

#include "losguide/experiment.hpp"
#include "losguide/mission.hpp"

#include <string>

namespace losguide {

/// Contents of a JSON config file. Every section is optional; missing keys
/// keep their defaults and unknown keys are rejected.
///
///   { "experiment": {...}, "matrix": {...}, "sim": {...}, "mission": {...},
///     "parallel": 4 }
struct RunConfig {
  ExperimentConfig experiment;  ///< experiment.sim is the "sim" section
  MatrixAxes matrix;
  MissionScenario mission;
  int parallel = 1;
};

/// Throws std::runtime_error with the offending key path on bad input.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
/// Full dump including defaults; parse_run_config(dump_run_config(c)) == c.
std::string dump_run_config(const RunConfig& c);

/// A bare scenario document, i.e. the "mission" section on its own.
MissionScenario parse_mission_scenario(const std::string& json_text);
MissionScenario load_mission_scenario(const std::string& path);
std::string dump_mission_scenario(const MissionScenario& sc);

}  // namespace losguide
