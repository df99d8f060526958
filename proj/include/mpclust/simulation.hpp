#pragma once

// Synthetic multiple-partitions data: B independent blocks, each a G_b-component
// mixture in which component g shifts by tau the block variables whose
// 1-based within-block index is congruent to g modulo G_b, plus i.i.d. noise.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpclust/core_model.hpp"

namespace mpclust {

enum class NoiseFamily { gaussian, student3, laplace };

std::string to_string(NoiseFamily noise);
/// Accepts "gaussian", "student3" (or "student") and "laplace"; throws std::invalid_argument otherwise.
NoiseFamily parse_noise_family(const std::string& name);

struct SimulationConfig {
  int B = 3;
  std::vector<int> G{3, 3, 3};
  int block_size = 6;
  std::size_t n = 400;
  NoiseFamily noise = NoiseFamily::gaussian;
  std::optional<double> tau;
  std::optional<double> target_miscl;
  /// Per-block proportions; empty means uniform.
  std::vector<std::vector<double>> proportions;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument on an inconsistent configuration: both or
/// neither of tau / target_miscl, block_size < 3, bad proportions, or a target
/// at or above (G_b - 1) / G_b.
void validate(const SimulationConfig& config);

struct LabeledSample {
  Dataset data;
  std::vector<int> true_omega;
  PartitionSet true_partitions;
  double tau_used = 0.0;
};

/// True when variable k (0-based within its block) is shifted by component g.
bool is_shifted(int k, int g, int G_b);

/// Draws a sample; variables are laid out block after block. Requires a
/// resolved tau (calibrate_tau first when only target_miscl is set); throws
/// std::invalid_argument otherwise.
LabeledSample generate(const SimulationConfig& config, std::uint64_t seed);

struct MonteCarloRate {
  double rate = 0.0;
  double standard_error = 0.0;
};

/// Bayes misclassification rate of block `block` under the true mixture,
/// estimated from n_mc Monte-Carlo rows classified by the true-posterior MAP.
MonteCarloRate bayes_error_mc(const SimulationConfig& config, double tau, std::size_t n_mc, std::uint64_t seed,
                              int block = 0);

struct CalibrationOptions {
  double tol = 0.002;
  std::size_t n_mc = 200000;
  std::uint64_t seed = 20240607;
  int max_steps = 200;
};

/// Bisection for the tau whose Bayes error is within tol of target. The same
/// Monte-Carlo draws are reused for every tau tried. Throws std::invalid_argument
/// when target lies outside (0, (G_b - 1) / G_b).
double calibrate_tau(const SimulationConfig& config, double target, const CalibrationOptions& options = {},
                     int block = 0);

/// config with tau filled in, calibrating from target_miscl when needed.
SimulationConfig resolve_tau(SimulationConfig config, const CalibrationOptions& options = {});

}  // namespace mpclust
