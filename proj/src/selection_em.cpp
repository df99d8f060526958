#include "mpclust/selection_em.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "mpclust/errors.hpp"
#include "mpclust/parallel.hpp"

namespace mpclust {

double resolve_epsilon(const EMConfig& config, const DiscretizedData& disc) {
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (config.n_restarts < 1) throw std::invalid_argument("n_restarts must be >= 1");
  if (!(config.rel_tolerance >= 0.0)) throw std::invalid_argument("rel_tolerance must be >= 0");
  const int R_max = std::max(2, disc.max_bins());
  const double eps = config.epsilon.value_or(1.0 / (10.0 * static_cast<double>(disc.n) * R_max));
  if (!(eps > 0.0) || !(eps < 1.0 / R_max))
    throw std::invalid_argument("epsilon must lie in (0, 1/R_max) = (0, " + std::to_string(1.0 / R_max) + ")");
  return eps;
}

CandidateGrid CandidateGrid::enumerate(int B_max, int G_max) {
  if (B_max < 1 || G_max < 1) throw std::invalid_argument("B_max and G_max must be >= 1");
  CandidateGrid grid;
  grid.B_max = B_max;
  grid.G_max = G_max;
  for (int B = 1; B <= B_max; ++B) {
    std::vector<int> G(static_cast<std::size_t>(B), 1);
    for (;;) {
      grid.candidates.push_back({B, G});
      // next non-decreasing tuple in lexicographic order
      int k = B - 1;
      while (k >= 0 && G[k] == G_max) --k;
      if (k < 0) break;
      const int v = G[k] + 1;
      for (int m = k; m < B; ++m) G[m] = v;
    }
  }
  return grid;
}

std::vector<double> clamped_simplex_argmax(std::span<const double> w, double epsilon) {
  const std::size_t K = w.size();
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) return std::vector<double>(K, 1.0 / static_cast<double>(K));

  std::vector<char> clamped(K, 0);
  std::size_t n_clamped = 0;
  double scale = 0.0;
  for (;;) {
    double free_mass = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!clamped[k]) free_mass += w[k];
    }
    scale = (1.0 - static_cast<double>(n_clamped) * epsilon) / free_mass;
    bool changed = false;
    for (std::size_t k = 0; k < K; ++k) {
      if (!clamped[k] && w[k] * scale < epsilon) {
        clamped[k] = 1;
        ++n_clamped;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<double> u(K);
  for (std::size_t k = 0; k < K; ++k) u[k] = clamped[k] ? epsilon : w[k] * scale;
  return u;
}

double clamped_simplex_max(std::span<const double> w, double epsilon) {
  const auto u = clamped_simplex_argmax(w, epsilon);
  double value = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k] != 0.0) value += w[k] * std::log(u[k]);
  }
  return value;
}

EMState init_random(const DiscretizedData& disc, int B, std::span<const int> G, double epsilon,
                    std::uint64_t seed) {
  const std::size_t d = disc.d();
  if (B < 1) throw std::invalid_argument("B must be >= 1");
  if (static_cast<std::size_t>(B) > d)
    throw std::invalid_argument("cannot initialize " + std::to_string(B) + " blocks with d = " + std::to_string(d));
  if (G.size() != static_cast<std::size_t>(B)) throw std::invalid_argument("G must have B entries");
  for (int g : G) {
    if (g < 1) throw std::invalid_argument("every G_b must be >= 1");
  }

  std::mt19937_64 rng(seed);
  EMState state;
  state.structure.B = B;
  state.structure.G.assign(G.begin(), G.end());
  state.structure.omega.assign(d, 0);
  if (B > 1) {
    std::uniform_int_distribution<int> pick(0, B - 1);
    for (;;) {
      std::vector<char> used(static_cast<std::size_t>(B), 0);
      for (std::size_t j = 0; j < d; ++j) {
        state.structure.omega[j] = pick(rng);
        used[state.structure.omega[j]] = 1;
      }
      if (std::all_of(used.begin(), used.end(), [](char u) { return u != 0; })) break;
    }
  }

  auto& params = state.params;
  params.epsilon = epsilon;
  params.pi.resize(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) params.pi[b].assign(static_cast<std::size_t>(G[b]), 1.0 / G[b]);

  std::exponential_distribution<double> unit_exp(1.0);
  params.alpha.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const int R = disc.R(j);
    std::vector<double> freq(static_cast<std::size_t>(R), 0.0);
    for (int code : disc.codes[j]) freq[code] += 1.0;
    for (double& f : freq) f /= static_cast<double>(disc.n);

    const int Gb = G[state.structure.omega[j]];
    auto& table = params.alpha[j];
    table.resize(static_cast<std::size_t>(Gb) * R);
    std::vector<double> row(static_cast<std::size_t>(R));
    for (int g = 0; g < Gb; ++g) {
      double total = 0.0;
      for (int r = 0; r < R; ++r) {
        row[r] = unit_exp(rng);
        total += row[r];
      }
      for (int r = 0; r < R; ++r) row[r] = 0.5 * freq[r] + 0.5 * row[r] / total;
      const auto clamped = clamped_simplex_argmax(row, epsilon);
      std::copy(clamped.begin(), clamped.end(), table.begin() + static_cast<std::ptrdiff_t>(g) * R);
    }
  }
  return state;
}

EStepResult e_step_with_loglik(const DiscretizedData& disc, const ModelStructure& s,
                               const DiscreteParameters& params) {
  const auto R = disc.bin_counts();
  check_parameter_shapes(s, params, R);
  const auto blocks = s.blocks();
  EStepResult out;
  out.resp.t.resize(static_cast<std::size_t>(s.B));
  for (int b = 0; b < s.B; ++b) {
    const auto& pi = params.pi[b];
    Matrix t(disc.n, pi.size());
    if (blocks[b].empty()) {
      for (std::size_t i = 0; i < disc.n; ++i) std::copy(pi.begin(), pi.end(), t.row(i).begin());
      out.resp.t[b] = std::move(t);
      continue;
    }
    const Matrix joint = block_log_joint(disc, blocks[b], pi, params, true);
    double acc = 0.0;
    for (std::size_t i = 0; i < disc.n; ++i) {
      const auto row = joint.row(i);
      const double lse = log_sum_exp(row);
      acc += lse;
      auto dst = t.row(i);
      for (std::size_t g = 0; g < row.size(); ++g) dst[g] = std::exp(row[g] - lse);
    }
    if (!std::isfinite(acc)) throw NumericError("non-finite log-likelihood in block " + std::to_string(b + 1));
    out.loglik += acc;
    out.resp.t[b] = std::move(t);
  }
  return out;
}

Responsibilities e_step(const DiscretizedData& disc, const ModelStructure& s, const DiscreteParameters& params) {
  return e_step_with_loglik(disc, s, params).resp;
}

WeightedCounts weighted_counts(const DiscretizedData& disc, const Responsibilities& resp) {
  const std::size_t B = resp.t.size();
  const std::size_t d = disc.d();
  WeightedCounts out;
  out.counts.resize(B);
  out.totals.resize(B);
  for (std::size_t b = 0; b < B; ++b) {
    const Matrix& t = resp.t[b];
    if (t.rows != disc.n) throw DataError("responsibilities do not match the number of observations");
    const std::size_t G = t.cols;
    out.totals[b].assign(G, 0.0);
    for (std::size_t i = 0; i < disc.n; ++i) {
      for (std::size_t g = 0; g < G; ++g) out.totals[b][g] += t(i, g);
    }
    out.counts[b].resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      const int R = disc.R(j);
      auto& table = out.counts[b][j];
      table.assign(G * static_cast<std::size_t>(R), 0.0);
      const auto& codes = disc.codes[j];
      for (std::size_t i = 0; i < disc.n; ++i) {
        const double* row = &t.data[i * G];
        const int r = codes[i];
        for (std::size_t g = 0; g < G; ++g) table[g * R + r] += row[g];
      }
    }
  }
  return out;
}

VariableAssignment m_step_variables(const DiscretizedData& disc, const WeightedCounts& counts,
                                    std::span<const int> G, const PenaltySpec& spec, double epsilon) {
  const std::size_t B = G.size();
  if (counts.counts.size() != B) throw DataError("weighted counts do not match the block count");
  VariableAssignment out;
  out.omega.assign(disc.d(), 0);
  out.criteria.assign(disc.d(), std::vector<double>(B, 0.0));
  for (std::size_t j = 0; j < disc.d(); ++j) {
    const int R = disc.R(j);
    for (std::size_t b = 0; b < B; ++b) {
      const auto& table = counts.counts[b][j];
      double crit = 0.0;
      for (int g = 0; g < G[b]; ++g) {
        crit += clamped_simplex_max(std::span<const double>(table).subspan(static_cast<std::size_t>(g) * R, R), epsilon);
      }
      crit -= spec.alpha_term(disc.n, G[b], R);
      out.criteria[j][b] = crit;
      if (crit > out.criteria[j][out.omega[j]]) out.omega[j] = static_cast<int>(b);
    }
  }
  return out;
}

VariableAssignment m_step_variables(const DiscretizedData& disc, const Responsibilities& resp,
                                    std::span<const int> G, const PenaltySpec& spec, double epsilon) {
  return m_step_variables(disc, weighted_counts(disc, resp), G, spec, epsilon);
}

DiscreteParameters m_step_parameters(const DiscretizedData& disc, const WeightedCounts& counts,
                                     std::span<const int> omega, std::span<const int> G, double epsilon) {
  const std::size_t B = G.size();
  if (counts.totals.size() != B || omega.size() != disc.d())
    throw DataError("M-step inputs do not match the structure");
  DiscreteParameters params;
  params.epsilon = epsilon;
  params.pi.resize(B);
  for (std::size_t b = 0; b < B; ++b) params.pi[b] = clamped_simplex_argmax(counts.totals[b], epsilon);
  params.alpha.resize(disc.d());
  for (std::size_t j = 0; j < disc.d(); ++j) {
    const int R = disc.R(j);
    const int b = omega[j];
    const auto& table = counts.counts[b][j];
    auto& dst = params.alpha[j];
    dst.resize(static_cast<std::size_t>(G[b]) * R);
    for (int g = 0; g < G[b]; ++g) {
      const auto row = clamped_simplex_argmax(
          std::span<const double>(table).subspan(static_cast<std::size_t>(g) * R, R), epsilon);
      std::copy(row.begin(), row.end(), dst.begin() + static_cast<std::ptrdiff_t>(g) * R);
    }
  }
  return params;
}

DiscreteParameters m_step_parameters(const DiscretizedData& disc, const Responsibilities& resp,
                                     std::span<const int> omega, std::span<const int> G, double epsilon) {
  return m_step_parameters(disc, weighted_counts(disc, resp), omega, G, epsilon);
}

FitResult run_em_from(const DiscretizedData& disc, EMState state, const EMConfig& config,
                      const PenaltySpec& spec, bool fix_omega) {
  const double eps = resolve_epsilon(config, disc);
  const auto R = disc.bin_counts();
  ModelStructure& s = state.structure;
  DiscreteParameters& params = state.params;
  for (int g : s.G) {
    if (!(eps * g < 1.0)) throw std::invalid_argument("epsilon too large for G_b = " + std::to_string(g));
  }

  EStepResult es = e_step_with_loglik(disc, s, params);
  double pen = penalty(spec, disc.n, s, R).total;
  double objective = es.loglik - pen;

  FitResult fit;
  fit.objective_trace.push_back(objective);
  for (int it = 1; it <= config.max_iterations; ++it) {
    const WeightedCounts counts = weighted_counts(disc, es.resp);
    if (!fix_omega) s.omega = m_step_variables(disc, counts, s.G, spec, eps).omega;
    params = m_step_parameters(disc, counts, s.omega, s.G, eps);
    es = e_step_with_loglik(disc, s, params);
    pen = penalty(spec, disc.n, s, R).total;
    const double next = es.loglik - pen;
    fit.objective_trace.push_back(next);
    fit.n_iterations = it;
    const bool done = std::abs(next - objective) <= config.rel_tolerance * std::abs(objective);
    objective = next;
    if (done) {
      fit.converged = true;
      break;
    }
  }

  fit.structure = std::move(s);
  fit.params = std::move(params);
  fit.loglik = es.loglik;
  fit.penalty = pen;
  fit.penalized_loglik = objective;
  fit.responsibilities = std::move(es.resp);
  fit.map_partitions = map_partition(fit.responsibilities);
  return fit;
}

FitResult run_em(const DiscretizedData& disc, int B, std::span<const int> G, const EMConfig& config,
                 std::uint64_t seed, const PenaltySpec& spec) {
  const double eps = resolve_epsilon(config, disc);
  FitResult fit = run_em_from(disc, init_random(disc, B, G, eps, seed), config, spec);
  return prune_empty_blocks(std::move(fit), disc.n, disc.bin_counts(), spec);
}

FitResult prune_empty_blocks(FitResult fit, std::size_t n, std::span<const int> R, const PenaltySpec& spec) {
  ModelStructure& s = fit.structure;
  const auto sizes = s.block_sizes();
  std::vector<int> remap(static_cast<std::size_t>(s.B), -1);
  int kept = 0;
  for (int b = 0; b < s.B; ++b) {
    if (sizes[b] > 0) remap[b] = kept++;
  }
  if (kept != s.B) {
    ModelStructure pruned;
    pruned.B = kept;
    DiscreteParameters params;
    params.epsilon = fit.params.epsilon;
    params.alpha = std::move(fit.params.alpha);
    Responsibilities resp;
    PartitionSet parts;
    for (int b = 0; b < s.B; ++b) {
      if (remap[b] < 0) continue;
      pruned.G.push_back(s.G[b]);
      params.pi.push_back(std::move(fit.params.pi[b]));
      resp.t.push_back(std::move(fit.responsibilities.t[b]));
      if (static_cast<std::size_t>(b) < fit.map_partitions.assignments.size())
        parts.assignments.push_back(std::move(fit.map_partitions.assignments[b]));
    }
    pruned.omega.resize(s.omega.size());
    for (std::size_t j = 0; j < s.omega.size(); ++j) pruned.omega[j] = remap[s.omega[j]];
    fit.structure = std::move(pruned);
    fit.params = std::move(params);
    fit.responsibilities = std::move(resp);
    fit.map_partitions = std::move(parts);
  }
  fit.penalty = penalty(spec, n, fit.structure, R).total;
  fit.penalized_loglik = fit.loglik - fit.penalty;
  return fit;
}

std::uint64_t restart_seed(std::uint64_t master_seed, std::size_t candidate, int restart) {
  return derive_seed(master_seed, 0x5e1ec7ULL, candidate, static_cast<std::uint64_t>(restart));
}

bool ranks_above(bool a_admissible, double a_objective, bool b_admissible, double b_objective) {
  if (a_admissible != b_admissible) return a_admissible;
  return a_objective > b_objective + 1e-10 * std::max(1.0, std::abs(b_objective));
}

SelectionResult select_model(const DiscretizedData& disc, const CandidateGrid& grid, const EMConfig& config,
                             const PenaltySpec& spec) {
  if (grid.candidates.empty()) throw std::invalid_argument("empty candidate grid");
  const double eps = resolve_epsilon(config, disc);
  const int d = static_cast<int>(disc.d());
  for (const Candidate& c : grid.candidates) {
    if (c.B < 1 || c.B > grid.B_max || static_cast<int>(c.G.size()) != c.B)
      throw std::invalid_argument("candidate outside the grid bounds");
    for (int g : c.G) {
      if (g < 1 || g > grid.G_max) throw std::invalid_argument("candidate outside the grid bounds");
    }
    if (c.B > d) throw std::invalid_argument("candidate with more blocks than variables");
  }

  const std::size_t restarts = static_cast<std::size_t>(config.n_restarts);
  const std::size_t tasks = grid.candidates.size() * restarts;
  std::vector<FitResult> fits(tasks);
  std::vector<char> admissible(tasks, 0);
  const auto R = disc.bin_counts();
  parallel_for(tasks, config.threads, [&](std::size_t task) {
    const std::size_t c = task / restarts;
    const int r = static_cast<int>(task % restarts);
    const Candidate& cand = grid.candidates[c];
    EMState init = init_random(disc, cand.B, cand.G, eps, restart_seed(config.master_seed, c, r));
    FitResult fit = prune_empty_blocks(run_em_from(disc, std::move(init), config, spec), disc.n, R, spec);
    admissible[task] = validate_structure(fit.structure, d, grid.B_max, grid.G_max).ok() ? 1 : 0;
    fits[task] = std::move(fit);
  });

  SelectionResult out;
  std::size_t best_task = 0;
  for (std::size_t c = 0; c < grid.candidates.size(); ++c) {
    std::size_t best = c * restarts;
    for (std::size_t k = best + 1; k < (c + 1) * restarts; ++k) {
      if (ranks_above(admissible[k], fits[k].penalized_loglik, admissible[best], fits[best].penalized_loglik))
        best = k;
    }
    CandidateSummary summary;
    summary.candidate = grid.candidates[c];
    summary.best_restart = static_cast<int>(best - c * restarts);
    summary.best_objective = fits[best].penalized_loglik;
    summary.best_structure = fits[best].structure;
    summary.admissible = admissible[best] != 0;
    out.candidates.push_back(std::move(summary));
    if (c == 0 || ranks_above(admissible[best], fits[best].penalized_loglik, admissible[best_task],
                              fits[best_task].penalized_loglik)) {
      best_task = best;
      out.selected_candidate = c;
    }
  }
  out.best = std::move(fits[best_task]);
  return out;
}

}  // namespace mpclust
