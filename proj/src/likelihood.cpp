#include "mpclust/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mpclust/errors.hpp"

namespace mpclust {

PenaltySpec PenaltySpec::custom(PiTerm pi_term, AlphaTerm alpha_term) {
  if (!pi_term || !alpha_term) throw std::invalid_argument("custom penalty needs both terms");
  PenaltySpec spec;
  spec.kind_ = Kind::custom;
  spec.pi_ = std::move(pi_term);
  spec.alpha_ = std::move(alpha_term);
  return spec;
}

double PenaltySpec::pi_term(std::size_t n, int G_b) const {
  if (kind_ == Kind::custom) return pi_(n, G_b);
  return (G_b - 1) * std::log(static_cast<double>(n)) / 2.0;
}

double PenaltySpec::alpha_term(std::size_t n, int G_b, int R_j) const {
  if (kind_ == Kind::custom) return alpha_(n, G_b, R_j);
  return static_cast<double>(R_j - 1) * G_b * std::log(static_cast<double>(n)) / 2.0;
}

PenaltyValue penalty(const PenaltySpec& spec, std::size_t n, const ModelStructure& s,
                     std::span<const int> R) {
  PenaltyValue out;
  out.per_block.resize(static_cast<std::size_t>(s.B));
  out.per_variable.resize(s.omega.size());
  for (int b = 0; b < s.B; ++b) {
    out.per_block[b] = spec.pi_term(n, s.G[b]);
    out.total += out.per_block[b];
  }
  for (std::size_t j = 0; j < s.omega.size(); ++j) {
    out.per_variable[j] = spec.alpha_term(n, s.G[s.omega[j]], R[j]);
    out.total += out.per_variable[j];
  }
  return out;
}

double log_sum_exp(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double block_log_density(std::span<const int> levels, std::span<const int> variables,
                         const DiscreteParameters& params, int block, const BinningScheme& scheme) {
  const auto& pi = params.pi[block];
  std::vector<double> terms(pi.size());
  for (std::size_t g = 0; g < pi.size(); ++g) {
    double acc = std::log(pi[g]);
    for (std::size_t k = 0; k < variables.size(); ++k) {
      const int j = variables[k];
      const VariableBins& bins = scheme.variables[j];
      const int r = levels[k];
      acc += std::log(params.alpha_at(j, static_cast<int>(g), r, bins.R())) - std::log(bins.measures[r]);
    }
    terms[g] = acc;
  }
  return log_sum_exp(terms);
}

Matrix block_log_joint(const DiscretizedData& disc, std::span<const int> variables,
                       std::span<const double> pi_b, const DiscreteParameters& params,
                       bool include_measures) {
  const std::size_t G = pi_b.size();
  Matrix out(disc.n, G);
  for (std::size_t g = 0; g < G; ++g) {
    const double lp = std::log(pi_b[g]);
    for (std::size_t i = 0; i < disc.n; ++i) out(i, g) = lp;
  }
  std::vector<double> table;
  for (int j : variables) {
    const int R = disc.R(j);
    const auto& measures = disc.scheme.variables[j].measures;
    table.resize(G * static_cast<std::size_t>(R));
    for (std::size_t g = 0; g < G; ++g) {
      for (int r = 0; r < R; ++r) {
        double v = std::log(params.alpha_at(j, static_cast<int>(g), r, R));
        if (include_measures) v -= std::log(measures[r]);
        table[g * R + r] = v;
      }
    }
    const auto& codes = disc.codes[j];
    for (std::size_t i = 0; i < disc.n; ++i) {
      const int r = codes[i];
      double* row = &out.data[i * G];
      for (std::size_t g = 0; g < G; ++g) row[g] += table[g * R + r];
    }
  }
  return out;
}

void check_parameter_shapes(const ModelStructure& s, const DiscreteParameters& params,
                            std::span<const int> R) {
  if (R.size() != s.omega.size())
    throw DataError("structure has " + std::to_string(s.omega.size()) + " variables, data has " +
                    std::to_string(R.size()));
  if (static_cast<int>(params.pi.size()) != s.B || static_cast<int>(s.G.size()) != s.B)
    throw DataError("parameters do not match the block count");
  for (int b = 0; b < s.B; ++b) {
    if (static_cast<int>(params.pi[b].size()) != s.G[b])
      throw DataError("pi of block " + std::to_string(b + 1) + " does not match G_b");
  }
  if (params.alpha.size() != s.omega.size()) throw DataError("alpha does not cover every variable");
  for (std::size_t j = 0; j < s.omega.size(); ++j) {
    const std::size_t expected = static_cast<std::size_t>(s.G[s.omega[j]]) * R[j];
    if (params.alpha[j].size() != expected)
      throw DataError("alpha of variable " + std::to_string(j + 1) + " has the wrong shape");
  }
}

std::vector<double> block_log_likelihoods(const DiscretizedData& disc, const ModelStructure& s,
                                          const DiscreteParameters& params) {
  const auto R = disc.bin_counts();
  check_parameter_shapes(s, params, R);
  const auto blocks = s.blocks();
  std::vector<double> out(static_cast<std::size_t>(s.B), 0.0);
  for (int b = 0; b < s.B; ++b) {
    if (blocks[b].empty()) continue;
    const Matrix joint = block_log_joint(disc, blocks[b], params.pi[b], params, true);
    double acc = 0.0;
    for (std::size_t i = 0; i < disc.n; ++i) acc += log_sum_exp(joint.row(i));
    out[b] = acc;
  }
  return out;
}

double log_likelihood(const DiscretizedData& disc, const ModelStructure& s, const DiscreteParameters& params) {
  double total = 0.0;
  for (double v : block_log_likelihoods(disc, s, params)) total += v;
  return total;
}

double penalized_log_likelihood(const DiscretizedData& disc, const ModelStructure& s,
                                const DiscreteParameters& params, const PenaltySpec& spec) {
  const auto R = disc.bin_counts();
  return log_likelihood(disc, s, params) - penalty(spec, disc.n, s, R).total;
}

}  // namespace mpclust
