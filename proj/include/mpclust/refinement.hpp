#pragma once

// Post-selection refinement: with the block structure held fixed, each block's
// partition is re-estimated by an EM-like iteration whose class-conditional
// densities are weighted Gaussian kernel density estimates on the original
// continuous data.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mpclust/core_model.hpp"

namespace mpclust {

/// 0.9 min(sd, IQR / 1.34) n^(-1/5); falls back to sd when the IQR is 0.
/// Throws DataError on a constant column.
double silverman_bandwidth(std::span<const double> column);

/// Weighted Gaussian KDE at x. Throws std::invalid_argument when h <= 0, the
/// sizes differ, a weight is negative, or the weights sum to zero.
double kde_eval(std::span<const double> points, std::span<const double> weights, double h, double x);

struct RefineConfig {
  int max_iterations = 200;
  double rel_tolerance = 1e-8;
  /// Proportion given to a component that lost all its weight.
  double epsilon = 1e-8;
};

struct BlockRefinement {
  Matrix responsibilities;
  std::vector<int> partition;
  std::vector<double> pi;
  std::vector<double> bandwidths;
  std::vector<double> objective_trace;
  int n_iterations = 0;
  bool converged = false;
};

/// Refines one block. `columns` are its continuous variables (each of length n),
/// `init_resp` the n x G_b responsibilities of the discretized fit.
/// `fixed_log_terms`, when given, is an n x G_b matrix of class-conditional
/// log-probabilities of the block's categorical variables, added unchanged.
BlockRefinement refine_block(std::span<const std::vector<double>> columns, int G, const Matrix& init_resp,
                             const RefineConfig& config, const Matrix* fixed_log_terms = nullptr);

/// Refines every block of a fit on the undiscretized data. Categorical
/// variables keep the fit's multinomial estimates. Throws DataError when the
/// data and the fit disagree on shape.
std::vector<BlockRefinement> refine_fit(const Dataset& data, const FitResult& fit, const RefineConfig& config,
                                        int threads = 1);

}  // namespace mpclust
