#pragma once

// Quantile binning of continuous variables into histogram cells.

#include <cstddef>
#include <span>
#include <vector>

#include "mpclust/core_model.hpp"

namespace mpclust {

/// Bins of one variable. Continuous variables carry R+1 strictly increasing
/// boundaries; categorical variables carry none and use unit measures.
struct VariableBins {
  bool categorical = false;
  std::vector<double> boundaries;
  std::vector<double> measures;  // |I_r|, one per bin/level

  int R() const { return static_cast<int>(measures.size()); }
  bool operator==(const VariableBins&) const = default;
};

struct BinningScheme {
  std::vector<VariableBins> variables;

  std::size_t d() const { return variables.size(); }
  std::vector<int> bin_counts() const;
  bool operator==(const BinningScheme&) const = default;
};

/// Level codes of a dataset under a binning scheme, stored column-major:
/// codes[j][i] in 0..R_j-1.
struct DiscretizedData {
  std::size_t n = 0;
  std::vector<std::vector<int>> codes;
  BinningScheme scheme;

  std::size_t d() const { return codes.size(); }
  int R(std::size_t j) const { return scheme.variables[j].R(); }
  std::vector<int> bin_counts() const { return scheme.bin_counts(); }
  int max_bins() const;
};

/// R = max(2, floor(n^(1/k))).
int choose_num_bins(std::size_t n, int k);

/// Type-7 empirical quantile of an ascending-sorted sample at level p.
double empirical_quantile(std::span<const double> sorted, double p);

/// Quantile bins at levels r/R. The outer boundaries are the observed extremes
/// widened by 1e-9 of the range; tied boundaries are merged, reducing R.
/// Throws DataError on a constant column.
VariableBins build_bins(std::span<const double> column, int R);

/// Bins every continuous column with the same target R; categorical columns
/// become unit-measure levels.
BinningScheme build_scheme(const Dataset& data, int R);

/// Per-variable targets; entries for categorical columns are ignored.
BinningScheme build_scheme(const Dataset& data, std::span<const int> R);

/// Half-open bins [b_{r-1}, b_r), last bin closed; values outside the
/// boundaries clamp to the extreme bins.
int bin_index(const VariableBins& bins, double x);

/// Throws DataError on a dimension or type mismatch.
DiscretizedData discretize(const Dataset& data, const BinningScheme& scheme);

}  // namespace mpclust
