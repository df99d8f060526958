#pragma once

// Discretized block densities, observed-data log-likelihood and penalties.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mpclust/binning.hpp"
#include "mpclust/core_model.hpp"

namespace mpclust {

/// A decomposable penalty a_{n,m,R} = sum_b (a_pi(n, G_b) + sum_{j in Omega_b} a_alpha(n, G_b, R_j)).
class PenaltySpec {
 public:
  enum class Kind { bic, custom };
  using PiTerm = std::function<double(std::size_t n, int G_b)>;
  using AlphaTerm = std::function<double(std::size_t n, int G_b, int R_j)>;

  /// nu_m ln(n) / 2.
  static PenaltySpec bic() { return PenaltySpec(); }
  static PenaltySpec custom(PiTerm pi_term, AlphaTerm alpha_term);

  Kind kind() const { return kind_; }
  double pi_term(std::size_t n, int G_b) const;
  double alpha_term(std::size_t n, int G_b, int R_j) const;

 private:
  Kind kind_ = Kind::bic;
  PiTerm pi_;
  AlphaTerm alpha_;
};

struct PenaltyValue {
  double total = 0.0;
  std::vector<double> per_block;     // a_{n,pi_b,R}
  std::vector<double> per_variable;  // a_{n,alpha_{R omega_j j},R}
};

PenaltyValue penalty(const PenaltySpec& spec, std::size_t n, const ModelStructure& structure,
                     std::span<const int> bins_per_variable);

/// ln sum_g pi_bg prod_k alpha_{g, variables[k], levels[k]} / |I_{variables[k], levels[k]}|.
double block_log_density(std::span<const int> levels, std::span<const int> variables,
                         const DiscreteParameters& params, int block, const BinningScheme& scheme);

/// n x G_b matrix of ln(pi_bg) + sum_{j in variables} ln(alpha_{g j code_ij}), optionally
/// including -ln|I_{j code_ij}|.
Matrix block_log_joint(const DiscretizedData& disc, std::span<const int> variables,
                       std::span<const double> pi_b, const DiscreteParameters& params,
                       bool include_measures);

/// Stable ln sum exp over a row.
double log_sum_exp(std::span<const double> values);

/// Observed-data log-likelihood, one term per block (empty blocks contribute 0).
std::vector<double> block_log_likelihoods(const DiscretizedData& disc, const ModelStructure& structure,
                                          const DiscreteParameters& params);

/// Sum over blocks of block_log_likelihoods. Throws DataError on dimension mismatch.
double log_likelihood(const DiscretizedData& disc, const ModelStructure& structure,
                      const DiscreteParameters& params);

double penalized_log_likelihood(const DiscretizedData& disc, const ModelStructure& structure,
                                const DiscreteParameters& params, const PenaltySpec& spec);

/// Throws DataError unless params has the shapes implied by structure and the bin counts.
void check_parameter_shapes(const ModelStructure& structure, const DiscreteParameters& params,
                            std::span<const int> bins_per_variable);

}  // namespace mpclust
