#include "mpclust/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mpclust/binning.hpp"
#include "mpclust/errors.hpp"
#include "mpclust/likelihood.hpp"
#include "mpclust/parallel.hpp"

namespace mpclust {

double silverman_bandwidth(std::span<const double> column) {
  const std::size_t n = column.size();
  if (n < 2) throw DataError("bandwidth needs at least two observations");
  double mean = 0.0;
  for (double v : column) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : column) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DataError("constant column");

  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = empirical_quantile(sorted, 0.75) - empirical_quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

namespace {

double gaussian_kernel(double u, double h) {
  const double z = u / h;
  return std::exp(-0.5 * z * z) / (h * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double kde_eval(std::span<const double> points, std::span<const double> weights, double h, double x) {
  if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (points.size() != weights.size()) throw std::invalid_argument("points and weights differ in length");
  double total = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("negative kernel weight");
    total += weights[i];
    acc += weights[i] * gaussian_kernel(x - points[i], h);
  }
  if (!(total > 0.0)) throw std::invalid_argument("kernel weights sum to zero");
  return acc / total;
}

namespace {

// Kernel values K_h(x_i - x_k) of one variable, cached as a dense n x n table
// when it fits in memory and recomputed otherwise.
class KernelTable {
 public:
  KernelTable(const std::vector<double>& x, double h) : x_(x), h_(h) {
    const std::size_t n = x.size();
    if (n * n <= kMaxCached) {
      cache_.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        cache_[i * n + i] = gaussian_kernel(0.0, h);
        for (std::size_t k = i + 1; k < n; ++k) {
          const double v = gaussian_kernel(x[i] - x[k], h);
          cache_[i * n + k] = v;
          cache_[k * n + i] = v;
        }
      }
    }
  }

  // out[i] = sum_k K(x_i - x_k) w_k / total
  void smooth(std::span<const double> w, double total, std::vector<double>& out) const {
    const std::size_t n = x_.size();
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      if (!cache_.empty()) {
        const double* row = &cache_[i * n];
        for (std::size_t k = 0; k < n; ++k) acc += row[k] * w[k];
      } else {
        for (std::size_t k = 0; k < n; ++k) acc += gaussian_kernel(x_[i] - x_[k], h_) * w[k];
      }
      out[i] = acc / total;
    }
  }

 private:
  static constexpr std::size_t kMaxCached = std::size_t{1} << 23;
  const std::vector<double>& x_;
  double h_;
  std::vector<double> cache_;
};

}  // namespace

BlockRefinement refine_block(std::span<const std::vector<double>> columns, int G, const Matrix& init_resp,
                             const RefineConfig& config, const Matrix* fixed_log_terms) {
  if (G < 1) throw std::invalid_argument("G_b must be >= 1");
  const std::size_t n = init_resp.rows;
  if (init_resp.cols != static_cast<std::size_t>(G)) throw DataError("initial responsibilities do not have G_b columns");
  for (const auto& col : columns) {
    if (col.size() != n) throw DataError("block column length differs from the responsibilities");
  }
  if (fixed_log_terms && (fixed_log_terms->rows != n || fixed_log_terms->cols != init_resp.cols))
    throw DataError("fixed log terms do not match the responsibilities");

  BlockRefinement out;
  out.bandwidths.reserve(columns.size());
  for (const auto& col : columns) out.bandwidths.push_back(silverman_bandwidth(col));

  if (G == 1) {
    out.responsibilities = Matrix(n, 1, 1.0);
    out.partition.assign(n, 0);
    out.pi = {1.0};
    out.converged = true;
    return out;
  }

  std::vector<KernelTable> kernels;
  kernels.reserve(columns.size());
  for (std::size_t k = 0; k < columns.size(); ++k) kernels.emplace_back(columns[k], out.bandwidths[k]);

  Matrix t = init_resp;
  Matrix log_joint(n, static_cast<std::size_t>(G));
  std::vector<double> w(n);
  std::vector<double> density;
  const std::vector<double> ones(n, 1.0);
  std::vector<double> pi(static_cast<std::size_t>(G));
  double previous = 0.0;

  for (int it = 1; it <= config.max_iterations; ++it) {
    // M-like step: proportions and weighted KDEs.
    double pi_total = 0.0;
    for (int g = 0; g < G; ++g) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += t(i, g);
      const bool empty = total < 1e-12;
      pi[g] = empty ? config.epsilon : total / static_cast<double>(n);
      pi_total += pi[g];
      const double lp = std::log(pi[g]);
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = t(i, g);
        log_joint(i, g) = lp;
      }
      for (const auto& kernel : kernels) {
        if (empty) {
          kernel.smooth(ones, static_cast<double>(n), density);
        } else {
          kernel.smooth(w, total, density);
        }
        for (std::size_t i = 0; i < n; ++i)
          log_joint(i, g) += std::log(std::max(density[i], std::numeric_limits<double>::min()));
      }
    }
    for (int g = 0; g < G; ++g) pi[g] /= pi_total;
    const double log_norm = std::log(pi_total);

    // E-like step.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto row = log_joint.row(i);
      for (int g = 0; g < G; ++g) {
        row[g] -= log_norm;
        if (fixed_log_terms) row[g] += (*fixed_log_terms)(i, g);
      }
      const double lse = log_sum_exp(row);
      objective += lse;
      for (int g = 0; g < G; ++g) t(i, g) = std::exp(row[g] - lse);
    }
    if (!std::isfinite(objective)) throw NumericError("non-finite objective during refinement");
    out.objective_trace.push_back(objective);
    out.n_iterations = it;
    if (it > 1 && std::abs(objective - previous) <= config.rel_tolerance * std::abs(previous)) {
      out.converged = true;
      break;
    }
    previous = objective;
  }

  out.pi = pi;
  out.responsibilities = std::move(t);
  Responsibilities wrapped;
  wrapped.t.push_back(out.responsibilities);
  out.partition = map_partition(wrapped).assignments.front();
  return out;
}

std::vector<BlockRefinement> refine_fit(const Dataset& data, const FitResult& fit, const RefineConfig& config,
                                        int threads) {
  const ModelStructure& s = fit.structure;
  if (s.omega.size() != data.d())
    throw DataError("fit covers " + std::to_string(s.omega.size()) + " variables, data has " + std::to_string(data.d()));
  if (static_cast<int>(fit.responsibilities.t.size()) != s.B) throw DataError("fit has no responsibilities per block");
  for (const Matrix& t : fit.responsibilities.t) {
    if (t.rows != data.n()) throw DataError("fit responsibilities do not match the number of observations");
  }
  const auto blocks = s.blocks();
  std::vector<BlockRefinement> out(static_cast<std::size_t>(s.B));
  parallel_for(out.size(), threads, [&](std::size_t b) {
    const int G = s.G[b];
    std::vector<std::vector<double>> columns;
    Matrix fixed(data.n(), static_cast<std::size_t>(G), 0.0);
    bool has_categorical = false;
    for (int j : blocks[b]) {
      const ColumnType& type = data.column_type(j);
      if (!type.is_categorical()) {
        columns.push_back(data.column(j));
        continue;
      }
      has_categorical = true;
      const int L = static_cast<int>(fit.params.alpha[j].size()) / G;
      for (std::size_t i = 0; i < data.n(); ++i) {
        const int r = static_cast<int>(data(i, j)) - 1;
        if (r >= L) throw DataError("categorical level outside the fitted levels");
        for (int g = 0; g < G; ++g) fixed(i, g) += std::log(fit.params.alpha_at(j, g, r, L));
      }
    }
    out[b] = refine_block(columns, G, fit.responsibilities.t[b], config, has_categorical ? &fixed : nullptr);
  });
  return out;
}

}  // namespace mpclust
