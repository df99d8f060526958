#include "mpclust/binning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpclust/errors.hpp"

namespace mpclust {

std::vector<int> BinningScheme::bin_counts() const {
  std::vector<int> out;
  out.reserve(variables.size());
  for (const auto& v : variables) out.push_back(v.R());
  return out;
}

int DiscretizedData::max_bins() const {
  int best = 0;
  for (const auto& v : scheme.variables) best = std::max(best, v.R());
  return best;
}

namespace {

// floor(n^(1/k)) without trusting pow() at exact powers.
long long integer_root(std::size_t n, int k) {
  auto power_le = [&](long long r) {
    long double acc = 1.0L;
    for (int i = 0; i < k; ++i) {
      acc *= static_cast<long double>(r);
      if (acc > static_cast<long double>(n)) return false;
    }
    return true;
  };
  auto r = static_cast<long long>(std::floor(std::pow(static_cast<double>(n), 1.0 / k)));
  while (r > 0 && !power_le(r)) --r;
  while (power_le(r + 1)) ++r;
  return r;
}

}  // namespace

int choose_num_bins(std::size_t n, int k) {
  if (k < 1) throw std::invalid_argument("bins exponent denominator must be >= 1");
  return static_cast<int>(std::max<long long>(2, integer_root(n, k)));
}

double empirical_quantile(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

VariableBins build_bins(std::span<const double> column, int R) {
  if (R < 2) throw std::invalid_argument("number of bins must be >= 2");
  if (column.empty()) throw DataError("cannot bin an empty column");
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  const double range = sorted.back() - sorted.front();
  if (!(range > 0.0)) throw DataError("constant column");

  std::vector<double> b;
  b.reserve(static_cast<std::size_t>(R) + 1);
  b.push_back(sorted.front() - 1e-9 * range);
  for (int r = 1; r < R; ++r) {
    const double q = empirical_quantile(sorted, static_cast<double>(r) / R);
    if (q > b.back()) b.push_back(q);
  }
  const double hi = sorted.back() + 1e-9 * range;
  if (hi > b.back()) {
    b.push_back(hi);
  } else {
    b.back() = hi;
  }

  VariableBins bins;
  bins.boundaries = std::move(b);
  bins.measures.resize(bins.boundaries.size() - 1);
  for (std::size_t r = 0; r + 1 < bins.boundaries.size(); ++r)
    bins.measures[r] = bins.boundaries[r + 1] - bins.boundaries[r];
  return bins;
}

BinningScheme build_scheme(const Dataset& data, int R) {
  std::vector<int> per_variable(data.d(), R);
  return build_scheme(data, per_variable);
}

BinningScheme build_scheme(const Dataset& data, std::span<const int> R) {
  if (R.size() != data.d()) throw DataError("one bin count per column required");
  BinningScheme scheme;
  scheme.variables.reserve(data.d());
  for (std::size_t j = 0; j < data.d(); ++j) {
    const ColumnType& type = data.column_type(j);
    if (type.is_categorical()) {
      VariableBins levels;
      levels.categorical = true;
      levels.measures.assign(static_cast<std::size_t>(type.levels), 1.0);
      scheme.variables.push_back(std::move(levels));
      continue;
    }
    const auto col = data.column(j);
    try {
      scheme.variables.push_back(build_bins(col, R[j]));
    } catch (const DataError& e) {
      const std::string name = data.column_names().empty() ? std::to_string(j + 1) : data.column_names()[j];
      throw DataError(std::string(e.what()) + " (column " + name + ")");
    }
  }
  return scheme;
}

int bin_index(const VariableBins& bins, double x) {
  const auto& b = bins.boundaries;
  // interior boundaries are b[1..R-1]
  const auto first = b.begin() + 1;
  const auto last = b.end() - 1;
  return static_cast<int>(std::upper_bound(first, last, x) - first);
}

DiscretizedData discretize(const Dataset& data, const BinningScheme& scheme) {
  if (scheme.d() != data.d())
    throw DataError("binning scheme has " + std::to_string(scheme.d()) + " variables, data has " +
                    std::to_string(data.d()));
  DiscretizedData out;
  out.n = data.n();
  out.scheme = scheme;
  out.codes.assign(data.d(), std::vector<int>(data.n()));
  for (std::size_t j = 0; j < data.d(); ++j) {
    const VariableBins& bins = scheme.variables[j];
    const ColumnType& type = data.column_type(j);
    if (bins.categorical != type.is_categorical())
      throw DataError("column " + std::to_string(j + 1) + " type does not match the binning scheme");
    auto& codes = out.codes[j];
    if (bins.categorical) {
      if (bins.R() < type.levels)
        throw DataError("column " + std::to_string(j + 1) + " has more levels than the binning scheme");
      for (std::size_t i = 0; i < data.n(); ++i) codes[i] = static_cast<int>(data(i, j)) - 1;
    } else {
      if (bins.boundaries.size() < 3) throw DataError("continuous variable needs at least two bins");
      for (std::size_t i = 0; i < data.n(); ++i) codes[i] = bin_index(bins, data(i, j));
    }
  }
  return out;
}

}  // namespace mpclust
