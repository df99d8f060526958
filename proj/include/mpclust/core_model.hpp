#pragma once

// Shared domain types of the multiple-partitions clustering model.
//
// Indexing conventions: observations, variables, blocks, components and
// bins/levels are all 0-based in memory. Serialized outputs (see io.hpp)
// use 1-based labels.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mpclust {

enum class ColumnKind { continuous, categorical };

struct ColumnType {
  ColumnKind kind = ColumnKind::continuous;
  int levels = 0;  // L_j for categorical columns, unused otherwise

  static ColumnType continuous() { return {}; }
  static ColumnType categorical(int levels) { return {ColumnKind::categorical, levels}; }
  bool is_categorical() const { return kind == ColumnKind::categorical; }
  bool operator==(const ColumnType&) const = default;
};

/// n x d observation matrix, stored row-major. Categorical entries hold the
/// level codes 1..L_j as doubles.
class Dataset {
 public:
  Dataset() = default;
  /// Throws DataError when the shape is inconsistent, a value is not finite,
  /// or a categorical entry is not an integer in 1..L_j.
  Dataset(std::size_t n, std::size_t d, std::vector<double> values,
          std::vector<ColumnType> types, std::vector<std::string> names = {});

  std::size_t n() const { return n_; }
  std::size_t d() const { return d_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }
  std::vector<double> column(std::size_t j) const;
  const std::vector<double>& values() const { return values_; }
  const std::vector<ColumnType>& column_types() const { return types_; }
  const ColumnType& column_type(std::size_t j) const { return types_[j]; }
  const std::vector<std::string>& column_names() const { return names_; }

  bool operator==(const Dataset&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
  std::vector<ColumnType> types_;
  std::vector<std::string> names_;
};

/// The triple m = (B, G, omega).
struct ModelStructure {
  int B = 1;
  std::vector<int> G;      // G[b] components in block b
  std::vector<int> omega;  // omega[j] in 0..B-1

  std::size_t d() const { return omega.size(); }
  /// Omega_b for every block, variables in increasing order.
  std::vector<std::vector<int>> blocks() const;
  std::vector<int> block_sizes() const;

  bool operator==(const ModelStructure&) const = default;
};

struct StructureVerdict {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks membership of the competing set: B <= B_max, 1 <= G_b <= G_max,
/// omega_j in range and |Omega_b| >= 3 for every block.
StructureVerdict validate_structure(const ModelStructure& structure, int d, int B_max, int G_max);

/// Number of free parameters nu_m = sum_b (G_b - 1) + sum_{j in Omega_b} (R_j - 1) G_b.
long long complexity(const ModelStructure& structure, std::span<const int> bins_per_variable);

/// theta_R = (pi, alpha) of the discretized model.
///
/// alpha is stored per variable: alpha[j] is a G_{omega_j} x R_j row-major
/// table, so alpha[j][g * R_j + r] is the probability of level r for
/// variable j in component g of its block.
struct DiscreteParameters {
  std::vector<std::vector<double>> pi;
  std::vector<std::vector<double>> alpha;
  double epsilon = 0.0;

  double alpha_at(std::size_t j, int g, int r, int R_j) const {
    return alpha[j][static_cast<std::size_t>(g) * R_j + r];
  }
  bool operator==(const DiscreteParameters&) const = default;
};

/// Dense n x G matrix, row-major.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& operator()(std::size_t i, std::size_t k) { return data[i * cols + k]; }
  double operator()(std::size_t i, std::size_t k) const { return data[i * cols + k]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  bool operator==(const Matrix&) const = default;
};

/// Posterior membership probabilities t_ibg, one n x G_b matrix per block.
struct Responsibilities {
  std::vector<Matrix> t;
  bool operator==(const Responsibilities&) const = default;
};

/// One label vector per block, labels in 0..G_b-1.
struct PartitionSet {
  std::vector<std::vector<int>> assignments;
  bool operator==(const PartitionSet&) const = default;
};

/// MAP labels per block; ties go to the smallest component index.
PartitionSet map_partition(const Responsibilities& resp);

struct FitResult {
  ModelStructure structure;
  DiscreteParameters params;
  double penalized_loglik = 0.0;
  double loglik = 0.0;
  double penalty = 0.0;
  Responsibilities responsibilities;
  PartitionSet map_partitions;
  int n_iterations = 0;
  bool converged = false;
  /// Penalized observed log-likelihood after initialization and after every iteration.
  std::vector<double> objective_trace;

  bool operator==(const FitResult&) const = default;
};

}  // namespace mpclust
