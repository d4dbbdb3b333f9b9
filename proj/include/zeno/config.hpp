#pragma once

// JSON run configuration for single trajectories (schema version 1).
//
//   {
//     "version": 1,
//     "system":   {"energies": [0, 1], "hbar": 1},
//     "drive":    {"kind": "resonant_two_level", "v0": 1, "omega": 1, "t0": 0},
//     "schedule": {"preset": "continuous", "tau": 6.28, "E": 0, "delta_E": 0.28},
//     "method": "closed-form",
//     "integrator": {"step": 1e-4, "max_steps": 100000000},
//     "initial_state": [[1, 0], [0, 0]],
//     "sample_interval": 0.01,
//     "tau_convention": "total"
//   }
//
// Schedules are either {"segments": [{"t_start", "t_end", "result_E", "delta_E"}],
// "tau_total_measurement"?} or a preset: continuous {tau, E, delta_E}, pulsed
// {n, T, duty?, E, delta_E} or qnd {periods, pulse_width, E, delta_E, tail?}.
// delta_E is a positive number, "unmeasured" or null. Unknown keys are rejected.

#include <optional>
#include <string>

#include "json.hpp"
#include "zeno/core.hpp"
#include "zeno/schedules.hpp"

namespace zeno {

/// Schema violation; what() starts with the JSON path of the offending key.
class ConfigError : public ValidationError {
public:
  ConfigError(const std::string& path, const std::string& message)
      : ValidationError(path + ": " + message), path_(path) {}

  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

struct EvolveConfig {
  SystemSpec system;
  DriveSpec drive;
  MeasurementSchedule schedule;
  StateVector initial_state;
  schedules::RunOptions run;
};

EvolveConfig parse_evolve_config(const nlohmann::json& doc);
EvolveConfig load_evolve_config(const std::string& path);

/// "closed-form" / "closed_form" or "rk4".
schedules::Method parse_method(const std::string& name);
/// "total" or "per-segment" / "per_segment".
schedules::TauConvention parse_tau_convention(const std::string& name);

}  // namespace zeno
