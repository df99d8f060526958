#include "mpclust/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace mpclust {

double ari(std::span<const int> p, std::span<const int> q) {
  if (p.size() != q.size()) throw std::invalid_argument("ARI needs partitions of equal length");
  if (p.size() < 2) throw std::invalid_argument("ARI needs at least two items");
  std::map<std::pair<int, int>, long long> cells;
  std::map<int, long long> rows, cols;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++cells[{p[i], q[i]}];
    ++rows[p[i]];
    ++cols[q[i]];
  }
  auto pairs = [](long long c) { return static_cast<double>(c) * static_cast<double>(c - 1) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, c] : cells) index += pairs(c);
  for (const auto& [key, c] : rows) sum_rows += pairs(c);
  for (const auto& [key, c] : cols) sum_cols += pairs(c);
  const double expected = sum_rows * sum_cols / pairs(static_cast<long long>(p.size()));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (index - expected) / denom;
}

double block_ari(std::span<const int> omega_hat, std::span<const int> omega_true) {
  return ari(omega_hat, omega_true);
}

namespace {

// Best injective matching rows -> columns of an overlap matrix (rows <= cols),
// lexicographically smallest among the maximizers.
std::vector<int> exhaustive_matching(const std::vector<std::vector<int>>& overlap, std::size_t cols) {
  const std::size_t rows = overlap.size();
  std::vector<int> perm(cols);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best;
  long long best_score = -1;
  do {
    long long score = 0;
    for (std::size_t r = 0; r < rows; ++r) score += overlap[r][perm[r]];
    std::vector<int> head(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(rows));
    if (score > best_score || (score == best_score && head < best)) {
      best_score = score;
      best = head;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

EvaluationReport evaluate_partitions(const ModelStructure& fitted, const PartitionSet& fitted_partitions,
                                     std::span<const int> true_omega, std::span<const int> true_G,
                                     const PartitionSet& true_partitions) {
  EvaluationReport report;
  report.block_ari = block_ari(fitted.omega, true_omega);

  const std::size_t B_true = true_partitions.assignments.size();
  const std::size_t B_fit = fitted_partitions.assignments.size();
  {
    std::vector<int> a(fitted.G.begin(), fitted.G.end()), b(true_G.begin(), true_G.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    report.structure_match = a == b && static_cast<std::size_t>(fitted.B) == B_true;
  }

  std::vector<std::vector<int>> overlap(B_true, std::vector<int>(B_fit, 0));
  for (std::size_t j = 0; j < true_omega.size() && j < fitted.omega.size(); ++j) {
    const int t = true_omega[j];
    const int f = fitted.omega[j];
    if (t >= 0 && static_cast<std::size_t>(t) < B_true && f >= 0 && static_cast<std::size_t>(f) < B_fit)
      ++overlap[t][f];
  }

  std::vector<int> match(B_true, -1);
  if (B_true <= 5 && B_fit <= 5) {
    if (B_true <= B_fit) {
      match = exhaustive_matching(overlap, B_fit);
    } else {
      std::vector<std::vector<int>> transposed(B_fit, std::vector<int>(B_true));
      for (std::size_t t = 0; t < B_true; ++t)
        for (std::size_t f = 0; f < B_fit; ++f) transposed[f][t] = overlap[t][f];
      const auto back = exhaustive_matching(transposed, B_true);
      for (std::size_t f = 0; f < B_fit; ++f) match[back[f]] = static_cast<int>(f);
    }
  } else {
    std::vector<char> used_t(B_true, 0), used_f(B_fit, 0);
    for (std::size_t step = 0; step < std::min(B_true, B_fit); ++step) {
      int bt = -1, bf = -1, bv = -1;
      for (std::size_t t = 0; t < B_true; ++t) {
        if (used_t[t]) continue;
        for (std::size_t f = 0; f < B_fit; ++f) {
          if (!used_f[f] && overlap[t][f] > bv) {
            bv = overlap[t][f];
            bt = static_cast<int>(t);
            bf = static_cast<int>(f);
          }
        }
      }
      used_t[bt] = used_f[bf] = 1;
      match[bt] = bf;
    }
  }

  std::vector<char> used(B_fit, 0);
  for (int f : match) {
    if (f >= 0) used[f] = 1;
  }
  report.matched_block = match;
  report.per_block_ari.assign(B_true, 0.0);
  for (std::size_t t = 0; t < B_true; ++t) {
    const auto& truth = true_partitions.assignments[t];
    if (match[t] >= 0) {
      report.per_block_ari[t] = ari(fitted_partitions.assignments[match[t]], truth);
      continue;
    }
    // prefer fitted blocks nobody matched, otherwise any fitted block
    bool any_free = false;
    for (std::size_t f = 0; f < B_fit; ++f) any_free = any_free || !used[f];
    double best = 0.0;
    bool first = true;
    for (std::size_t f = 0; f < B_fit; ++f) {
      if (any_free && used[f]) continue;
      const double v = ari(fitted_partitions.assignments[f], truth);
      if (first || v > best) best = v;
      first = false;
    }
    report.per_block_ari[t] = first ? 0.0 : best;
  }
  double total = 0.0;
  for (double v : report.per_block_ari) total += v;
  report.mean_individual_ari = B_true == 0 ? 0.0 : total / static_cast<double>(B_true);
  return report;
}

EvaluationReport matched_individual_ari(const FitResult& fit, const LabeledSample& truth, std::span<const int> true_G) {
  return evaluate_partitions(fit.structure, fit.map_partitions, truth.true_omega, true_G, truth.true_partitions);
}

}  // namespace mpclust
