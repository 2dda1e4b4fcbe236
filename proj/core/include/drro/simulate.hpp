#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "drro/common.hpp"
#include "drro/finite_horizon.hpp"
#include "drro/realize.hpp"
#include "drro/spectral.hpp"
#include "drro/sysmodel.hpp"

namespace drro {

enum class DisturbanceKind { kWhite, kUniform, kSinusoid, kWorstCaseInfinite, kWorstCaseFinite };

const char* ToString(DisturbanceKind kind);
DisturbanceKind ParseDisturbanceKind(const std::string& name);

struct DisturbanceSpec {
  DisturbanceKind kind = DisturbanceKind::kWhite;
  double amplitude = 1.0;
  double frequency = 0.5;  // rad/sample, sinusoid only
  double phase = 0.0;
  double radius = 1.0;     // informational for the worst-case kinds
  Vector fir;              // worst_case_infinite coloring filter taps
  Matrix covariance_root;  // worst_case_finite: w = root * e over one block

  void Validate() const;
};

/// Coloring filter h_k, k < taps, from the inverse DFT of factor samples.
struct ColoringFilter {
  Vector taps;
  double truncation_energy = 0.0;  // sum of the dropped |h_k|^2 relative to the total
};

ColoringFilter FirFromFactor(const FactorSamples& factor, int taps = 512);

DisturbanceSpec WorstCaseInfiniteDisturbance(const FactorSamples& factor, double radius,
                                             int taps = 512);
DisturbanceSpec WorstCaseFiniteDisturbance(const Matrix& covariance, double radius);

/// Dense finite-horizon controller applied to consecutive blocks of
/// `block` steps. Each block adds the open-loop correction for the
/// block-initial plant state: u = K w_block + X x_block.
struct BlockReplayController {
  Matrix K;           // (block nu) x block
  Matrix correction;  // (block nu) x nx
  int block = 0;
};

/// Uses -(I + F'F)^{-1} F' O as the initial-state correction.
BlockReplayController MakeBlockReplay(const StateSpaceModel& model,
                                      const FiniteHorizonOperators& ops, const Matrix& K);

struct NamedController {
  std::string name;
  std::variant<RealizedController, BlockReplayController> controller;
};

struct ControllerStats {
  std::string name;
  Vector running_mean;      // mean over trials of (1/(t+1)) sum_{s<=t} cost_s
  Vector running_halfwidth; // 1.96 standard errors of the same
  Vector trial_average;     // per-trial horizon-average cost
  double mean = 0.0;
  double standard_error = 0.0;
};

struct RegretReport {
  int horizon = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  DisturbanceKind kind = DisturbanceKind::kWhite;
  std::vector<ControllerStats> controllers;
};

/// Runs the closed loops from x_0 = 0 with common random disturbances per
/// trial; trial i draws from mt19937_64 seeded by (seed, i).
RegretReport Simulate(const StateSpaceModel& model, const std::vector<NamedController>& controllers,
                      const DisturbanceSpec& dist, int horizon, int trials, std::uint64_t seed);

/// Disturbance sequence of one trial (exposed for tests).
Vector SampleDisturbance(const DisturbanceSpec& dist, int horizon, std::uint64_t seed, int trial);

/// Rows "time,controller,mean_cost,ci_halfwidth".
void WriteRegretReportCsv(std::ostream& out, const RegretReport& report);

}  // namespace drro
