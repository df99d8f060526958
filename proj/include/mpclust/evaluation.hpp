#pragma once

// Partition agreement scores for recovered structures.

#include <span>
#include <vector>

#include "mpclust/core_model.hpp"
#include "mpclust/simulation.hpp"

namespace mpclust {

/// Hubert-Arabie adjusted Rand index. Labels may be arbitrary integers.
/// Returns 1 when the chance-corrected denominator vanishes (both partitions
/// single-cluster, or both all-singletons). Throws std::invalid_argument on a
/// length mismatch or fewer than two items.
double ari(std::span<const int> p, std::span<const int> q);

/// ARI between two variable-to-block assignments.
double block_ari(std::span<const int> omega_hat, std::span<const int> omega_true);

struct EvaluationReport {
  double block_ari = 0.0;
  /// One entry per true block: ARI of its partition against the matched fitted block.
  std::vector<double> per_block_ari;
  /// matched_block[b] = fitted block matched to true block b, -1 when it had to reuse one.
  std::vector<int> matched_block;
  double mean_individual_ari = 0.0;
  /// (B, G) equal up to a permutation of blocks.
  bool structure_match = false;
};

/// Matches true blocks to fitted blocks by maximal total variable overlap
/// (exhaustive over injective matchings when both sides have at most 5 blocks,
/// greedy otherwise; ties to lower indices), then scores each matched pair.
/// True blocks left unmatched take their best ARI against any fitted partition.
EvaluationReport evaluate_partitions(const ModelStructure& fitted, const PartitionSet& fitted_partitions,
                                     std::span<const int> true_omega, std::span<const int> true_G,
                                     const PartitionSet& true_partitions);

EvaluationReport matched_individual_ari(const FitResult& fit, const LabeledSample& truth, std::span<const int> true_G);

}  // namespace mpclust
