#pragma once

// Modified EM for the multiple-partitions latent class model: for fixed
// (B, G) it alternates an E-step, a reassignment of every variable to its
// best block (M-step1) and closed-form parameter updates (M-step2), all on
// the penalized objective. select_model runs it over a grid of (B, G) with
// random restarts and returns the best penalized fit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mpclust/binning.hpp"
#include "mpclust/core_model.hpp"
#include "mpclust/likelihood.hpp"

namespace mpclust {

struct EMConfig {
  int max_iterations = 500;
  double rel_tolerance = 1e-7;
  int n_restarts = 20;
  /// Lower clamp for every probability; defaults to 1 / (10 n R_max).
  std::optional<double> epsilon;
  std::uint64_t master_seed = 0;
  /// Worker threads for select_model; 0 uses every hardware thread. Results do not depend on it.
  int threads = 1;
};

/// Throws std::invalid_argument unless max_iterations >= 1, n_restarts >= 1
/// and 0 < epsilon < 1 / R_max.
double resolve_epsilon(const EMConfig& config, const DiscretizedData& disc);

struct Candidate {
  int B = 1;
  std::vector<int> G;
  bool operator==(const Candidate&) const = default;
};

/// (B, G) pairs with non-decreasing G, B = 1..B_max, 1 <= G_b <= G_max.
struct CandidateGrid {
  int B_max = 3;
  int G_max = 3;
  std::vector<Candidate> candidates;

  static CandidateGrid enumerate(int B_max, int G_max);
};

struct EMState {
  ModelStructure structure;
  DiscreteParameters params;
};

/// Random starting point: omega uniform over assignments leaving no block
/// empty, pi uniform, alpha rows averaging the empirical marginal with a
/// uniform random probability vector. Throws std::invalid_argument when d < B.
EMState init_random(const DiscretizedData& disc, int B, std::span<const int> G, double epsilon,
                    std::uint64_t seed);

struct EStepResult {
  Responsibilities resp;
  /// Observed-data log-likelihood at the parameters the E-step used.
  double loglik = 0.0;
};

EStepResult e_step_with_loglik(const DiscretizedData& disc, const ModelStructure& structure,
                               const DiscreteParameters& params);

/// t_ibg; rows sum to one. Empty blocks get t_ib = pi_b.
Responsibilities e_step(const DiscretizedData& disc, const ModelStructure& structure,
                        const DiscreteParameters& params);

/// Sufficient statistics of one E-step: for block b and every variable j,
/// counts[b][j][g * R_j + r] = sum_i t_ibg [code_ij = r]; totals[b][g] = sum_i t_ibg.
struct WeightedCounts {
  std::vector<std::vector<std::vector<double>>> counts;
  std::vector<std::vector<double>> totals;
};

WeightedCounts weighted_counts(const DiscretizedData& disc, const Responsibilities& resp);

/// argmax of sum_k w_k ln u_k over {u : sum u = 1, u_k >= epsilon}. Coordinates
/// below epsilon are set to epsilon and the rest rescaled to fill 1 - (#clamped) epsilon,
/// repeated until no coordinate falls below. All-zero weights give the uniform vector.
std::vector<double> clamped_simplex_argmax(std::span<const double> weights, double epsilon);

/// sum_k w_k ln u_k at u = clamped_simplex_argmax(weights, epsilon).
double clamped_simplex_max(std::span<const double> weights, double epsilon);

struct VariableAssignment {
  std::vector<int> omega;
  /// criteria[j][b] = sum_g max_alpha Q(alpha | x_j, t_bg) - a_{n,alpha_bj,R}.
  std::vector<std::vector<double>> criteria;
};

/// M-step1. Each variable independently goes to its best block (ties to the
/// smallest index); blocks may come out empty.
VariableAssignment m_step_variables(const DiscretizedData& disc, const WeightedCounts& counts,
                                    std::span<const int> G, const PenaltySpec& spec, double epsilon);
VariableAssignment m_step_variables(const DiscretizedData& disc, const Responsibilities& resp,
                                    std::span<const int> G, const PenaltySpec& spec, double epsilon);

/// M-step2. pi_bg proportional to sum_i t_ibg and alpha_gj proportional to the weighted
/// level counts, both projected onto the epsilon-clamped simplex.
DiscreteParameters m_step_parameters(const DiscretizedData& disc, const WeightedCounts& counts,
                                     std::span<const int> omega, std::span<const int> G, double epsilon);
DiscreteParameters m_step_parameters(const DiscretizedData& disc, const Responsibilities& resp,
                                     std::span<const int> omega, std::span<const int> G, double epsilon);

/// Iterates from a given state. When fix_omega is set, M-step1 is skipped.
FitResult run_em_from(const DiscretizedData& disc, EMState state, const EMConfig& config,
                      const PenaltySpec& spec, bool fix_omega = false);

/// init_random followed by run_em_from and prune_empty_blocks.
FitResult run_em(const DiscretizedData& disc, int B, std::span<const int> G, const EMConfig& config,
                 std::uint64_t seed, const PenaltySpec& spec = PenaltySpec::bic());

/// Drops blocks with no variables, re-indexes the rest in order and recomputes
/// the penalty (the log-likelihood is unchanged).
FitResult prune_empty_blocks(FitResult fit, std::size_t n, std::span<const int> bins_per_variable,
                             const PenaltySpec& spec);

struct CandidateSummary {
  Candidate candidate;
  int best_restart = 0;
  double best_objective = 0.0;
  ModelStructure best_structure;  // after pruning
  bool admissible = false;        // every pruned block holds >= 3 variables
};

struct SelectionResult {
  FitResult best;
  std::size_t selected_candidate = 0;
  std::vector<CandidateSummary> candidates;
};

/// Seed of restart r of candidate c.
std::uint64_t restart_seed(std::uint64_t master_seed, std::size_t candidate, int restart);

/// Runs n_restarts EM fits per candidate and keeps the best. Admissible fits
/// outrank inadmissible ones; objectives within a relative 1e-10 count as tied
/// and ties go to the earlier candidate, then the earlier restart.
/// Throws std::invalid_argument on an empty grid.
SelectionResult select_model(const DiscretizedData& disc, const CandidateGrid& grid, const EMConfig& config,
                             const PenaltySpec& spec = PenaltySpec::bic());

/// True when `a` beats `b` under the selection order above.
bool ranks_above(bool a_admissible, double a_objective, bool b_admissible, double b_objective);

}  // namespace mpclust
