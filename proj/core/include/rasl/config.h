#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rasl/backend.h"
#include "rasl/relative_pose.h"
#include "rasl/simulate.h"
#include "rasl/trajectory.h"

namespace rasl {

// Every tunable of the command-line tool. Defaults are the library defaults.
struct RunConfig {
  RelativeRotationOptions relrot;
  CameraIntrinsics camera;
  double fps = 10.0;
  BackendOptions backend;
  TrajectoryFormat output_format = TrajectoryFormat::kTum;
  SimulationSpec simulate;

  // Simulation spec with the shared camera settings applied.
  SimulationSpec SimulationSettings() const;

  // Cross-field checks (grid size, depth range). Throws kInvalidConfig.
  void Validate() const;
};

struct ConfigKey {
  std::string key;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  // Parses and range-checks; throws kInvalidConfig with the reason.
  std::function<void(RunConfig&, const std::string&)> set;
};

// All keys in display order.
const std::vector<ConfigKey>& ConfigKeys();

// Sets one key; unknown keys and out-of-range values throw kInvalidConfig.
void SetConfigValue(RunConfig& config, const std::string& key,
                    const std::string& value);

// "key=value" as given on the command line.
void ApplyConfigOverride(RunConfig& config, const std::string& assignment);

// Flat "key = value" lines, '#' comments. Errors name source:line.
void LoadConfig(RunConfig& config, std::istream& in,
                const std::string& name = "<stream>");
void LoadConfigFile(RunConfig& config, const std::string& path);

// Effective configuration as a loadable file.
void PrintConfig(std::ostream& out, const RunConfig& config);

// One line per key with its default, for --help.
std::string ConfigHelp();

}  // namespace rasl
