#include "mpclust/core_model.hpp"

#include <cmath>
#include <string>

#include "mpclust/errors.hpp"

namespace mpclust {

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> values,
                 std::vector<ColumnType> types, std::vector<std::string> names)
    : n_(n), d_(d), values_(std::move(values)), types_(std::move(types)), names_(std::move(names)) {
  if (n_ == 0 || d_ == 0) throw DataError("dataset must have at least one row and one column");
  if (values_.size() != n_ * d_) throw DataError("dataset values do not match n x d");
  if (types_.size() != d_) throw DataError("one column type per column required");
  if (!names_.empty() && names_.size() != d_) throw DataError("one column name per column required");
  for (std::size_t j = 0; j < d_; ++j) {
    const ColumnType& type = types_[j];
    if (type.is_categorical() && type.levels < 1)
      throw DataError("categorical column " + std::to_string(j + 1) + " has no levels");
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = values_[i * d_ + j];
      if (!std::isfinite(v))
        throw DataError("missing or non-finite value at row " + std::to_string(i + 1) +
                        ", column " + std::to_string(j + 1));
      if (type.is_categorical() &&
          (v != std::floor(v) || v < 1.0 || v > static_cast<double>(type.levels)))
        throw DataError("categorical value out of 1.." + std::to_string(type.levels) + " at row " +
                        std::to_string(i + 1) + ", column " + std::to_string(j + 1));
    }
  }
}

std::vector<double> Dataset::column(std::size_t j) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = values_[i * d_ + j];
  return out;
}

std::vector<std::vector<int>> ModelStructure::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(B));
  for (std::size_t j = 0; j < omega.size(); ++j) {
    if (omega[j] >= 0 && omega[j] < B) out[omega[j]].push_back(static_cast<int>(j));
  }
  return out;
}

std::vector<int> ModelStructure::block_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(B), 0);
  for (int b : omega) {
    if (b >= 0 && b < B) ++sizes[b];
  }
  return sizes;
}

StructureVerdict validate_structure(const ModelStructure& s, int d, int B_max, int G_max) {
  StructureVerdict verdict;
  auto& v = verdict.violations;
  if (s.B < 1) v.push_back("B >= 1 fails (B = " + std::to_string(s.B) + ")");
  if (s.B > B_max) v.push_back("B <= B_max fails (" + std::to_string(s.B) + " > " + std::to_string(B_max) + ")");
  if (static_cast<int>(s.G.size()) != s.B)
    v.push_back("G has " + std::to_string(s.G.size()) + " entries, expected B = " + std::to_string(s.B));
  for (std::size_t b = 0; b < s.G.size(); ++b) {
    if (s.G[b] < 1) v.push_back("G_" + std::to_string(b + 1) + " >= 1 fails");
    if (s.G[b] > G_max)
      v.push_back("G_" + std::to_string(b + 1) + " <= G_max fails (" + std::to_string(s.G[b]) + " > " +
                  std::to_string(G_max) + ")");
  }
  if (static_cast<int>(s.omega.size()) != d)
    v.push_back("omega has " + std::to_string(s.omega.size()) + " entries, expected d = " + std::to_string(d));
  for (std::size_t j = 0; j < s.omega.size(); ++j) {
    if (s.omega[j] < 0 || s.omega[j] >= s.B)
      v.push_back("omega_" + std::to_string(j + 1) + " in 1..B fails");
  }
  if (s.B >= 1) {
    const auto sizes = s.block_sizes();
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      if (sizes[b] < 3) v.push_back("|Omega_" + std::to_string(b + 1) + "| >= 3 fails (" + std::to_string(sizes[b]) + ")");
    }
  }
  return verdict;
}

long long complexity(const ModelStructure& s, std::span<const int> R) {
  long long nu = 0;
  for (int b = 0; b < s.B; ++b) nu += s.G[b] - 1;
  for (std::size_t j = 0; j < s.omega.size(); ++j) {
    nu += static_cast<long long>(R[j] - 1) * s.G[s.omega[j]];
  }
  return nu;
}

PartitionSet map_partition(const Responsibilities& resp) {
  PartitionSet out;
  out.assignments.reserve(resp.t.size());
  for (const Matrix& t : resp.t) {
    std::vector<int> labels(t.rows, 0);
    for (std::size_t i = 0; i < t.rows; ++i) {
      auto row = t.row(i);
      std::size_t best = 0;
      for (std::size_t g = 1; g < row.size(); ++g) {
        if (row[g] > row[best]) best = g;
      }
      labels[i] = static_cast<int>(best);
    }
    out.assignments.push_back(std::move(labels));
  }
  return out;
}

}  // namespace mpclust
