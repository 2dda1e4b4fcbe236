#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "drro/common.hpp"

namespace drro {

struct SimulationConfig {
  int horizon = 210;
  int trials = 1000;
  std::uint64_t seed = 1;
  std::vector<std::string> disturbances{"white", "worst_case_infinite"};
  int replay_block = 30;  // finite-horizon DR-RO oracle replay length; 0 disables
  int fir_taps = 512;
  double amplitude = 1.0;
  double frequency = 0.5;
  double phase = 0.0;
};

/// Resolved run configuration (file values over defaults, flags over file).
struct RunConfig {
  std::filesystem::path model;
  std::vector<double> radii{1.0};
  int grid = 4096;
  double tol = 1e-6;
  int max_iterations = 2000;
  int degree = 3;
  std::optional<double> target_epsilon;  // lowest-degree mode when set
  int max_degree = 6;
  int verification_factor = 4;  // N' = factor * N
  std::optional<double> delta;
  int finite_horizon = 0;       // finite-horizon dual evaluation; 0 disables
  double ro_proxy_radius = 0.0; // 0 disables the large-radius baseline
  bool allow_nonconverged = false;
  SimulationConfig simulation;
  std::filesystem::path out;
  std::string source_text;  // the configuration file as read

  void Validate() const;
};

/// Parses a JSON configuration; relative paths resolve against base_dir.
RunConfig ParseRunConfig(const std::string& text, const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);
std::string RunConfigToJson(const RunConfig& config);

enum class ExitStatus { kSuccess = 0, kConfigError = 2, kNumericalFailure = 3, kNonConvergence = 4 };

ExitStatus ExitStatusFor(ErrorCode code);

/// Directory holding the artifacts of one radius, e.g. out/r_1.5.
std::filesystem::path RadiusDirectory(const RunConfig& config, double r);

// Stages. Each reads its inputs from the artifacts of the previous stage
// in RadiusDirectory, so they can also run one at a time.
void CmdSynthesize(const RunConfig& config);
void CmdApproximate(const RunConfig& config);
void CmdRealize(const RunConfig& config);
void CmdEvaluate(const RunConfig& config);
void CmdSimulate(const RunConfig& config);
void CmdPipeline(const RunConfig& config);

/// Runs a named command, writing config.json / resolved_config.json before
/// and error.json on failure. Returns the process exit status.
int RunCommand(const std::string& command, const RunConfig& config);

}  // namespace drro
