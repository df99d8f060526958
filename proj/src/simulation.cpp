#include "mpclust/simulation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "mpclust/errors.hpp"

namespace mpclust {

std::string to_string(NoiseFamily noise) {
  switch (noise) {
    case NoiseFamily::gaussian:
      return "gaussian";
    case NoiseFamily::student3:
      return "student3";
    case NoiseFamily::laplace:
      return "laplace";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(const std::string& name) {
  if (name == "gaussian" || name == "normal") return NoiseFamily::gaussian;
  if (name == "student3" || name == "student") return NoiseFamily::student3;
  if (name == "laplace") return NoiseFamily::laplace;
  throw std::invalid_argument("unknown noise family '" + name + "' (gaussian, student3, laplace)");
}

void validate(const SimulationConfig& c) {
  if (c.tau.has_value() == c.target_miscl.has_value())
    throw std::invalid_argument("tau and target misclassification rate are mutually exclusive; set exactly one");
  if (c.B < 1) throw std::invalid_argument("B must be >= 1");
  if (static_cast<int>(c.G.size()) != c.B) throw std::invalid_argument("G must have B entries");
  if (c.block_size < 3) throw std::invalid_argument("block size must be >= 3");
  if (c.n < 1) throw std::invalid_argument("n must be >= 1");
  for (int g : c.G) {
    if (g < 1) throw std::invalid_argument("every G_b must be >= 1");
  }
  if (c.tau && !(*c.tau >= 0.0 && std::isfinite(*c.tau))) throw std::invalid_argument("tau must be a finite value >= 0");
  if (c.target_miscl) {
    for (int g : c.G) {
      const double ceiling = static_cast<double>(g - 1) / g;
      if (!(*c.target_miscl > 0.0 && *c.target_miscl < ceiling))
        throw std::invalid_argument("target misclassification rate must lie in (0, (G_b-1)/G_b)");
    }
  }
  if (!c.proportions.empty()) {
    if (static_cast<int>(c.proportions.size()) != c.B) throw std::invalid_argument("one proportion vector per block");
    for (int b = 0; b < c.B; ++b) {
      const auto& p = c.proportions[b];
      if (static_cast<int>(p.size()) != c.G[b]) throw std::invalid_argument("proportions must have G_b entries");
      double total = 0.0;
      for (double v : p) {
        if (!(v > 0.0)) throw std::invalid_argument("proportions must be positive");
        total += v;
      }
      if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("proportions must sum to 1");
    }
  }
}

bool is_shifted(int k, int g, int G_b) { return k % G_b == g; }

namespace {

std::vector<double> block_proportions(const SimulationConfig& c, int b) {
  if (!c.proportions.empty()) return c.proportions[b];
  return std::vector<double>(static_cast<std::size_t>(c.G[b]), 1.0 / c.G[b]);
}

class NoiseSampler {
 public:
  explicit NoiseSampler(NoiseFamily family) : family_(family), student_(3.0) {}
  double operator()(std::mt19937_64& rng) {
    switch (family_) {
      case NoiseFamily::gaussian:
        return normal_(rng);
      case NoiseFamily::student3:
        return student_(rng);
      case NoiseFamily::laplace:
        return exp_(rng) - exp_(rng);
    }
    return 0.0;
  }

 private:
  NoiseFamily family_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::student_t_distribution<double> student_;
  std::exponential_distribution<double> exp_{1.0};
};

// Log density up to an additive constant.
double noise_log_density(NoiseFamily family, double x) {
  switch (family) {
    case NoiseFamily::gaussian:
      return -0.5 * x * x;
    case NoiseFamily::student3:
      return -2.0 * std::log1p(x * x / 3.0);
    case NoiseFamily::laplace:
      return -std::abs(x);
  }
  return 0.0;
}

struct MonteCarloDraws {
  std::vector<int> labels;
  std::vector<double> noise;  // n_mc x block_size
};

MonteCarloDraws draw_block(const SimulationConfig& c, std::size_t n_mc, std::uint64_t seed, int block) {
  std::mt19937_64 rng(seed);
  const auto p = block_proportions(c, block);
  std::discrete_distribution<int> label(p.begin(), p.end());
  NoiseSampler noise(c.noise);
  MonteCarloDraws draws;
  draws.labels.resize(n_mc);
  draws.noise.resize(n_mc * static_cast<std::size_t>(c.block_size));
  for (std::size_t i = 0; i < n_mc; ++i) {
    draws.labels[i] = label(rng);
    for (int k = 0; k < c.block_size; ++k) draws.noise[i * c.block_size + k] = noise(rng);
  }
  return draws;
}

double misclassification(const SimulationConfig& c, const MonteCarloDraws& draws, double tau, int block) {
  const int G = c.G[block];
  const int m = c.block_size;
  const auto p = block_proportions(c, block);
  std::vector<double> log_prior(static_cast<std::size_t>(G));
  for (int g = 0; g < G; ++g) log_prior[g] = std::log(p[g]);

  // per-variable log densities under "shifted" and "not shifted"
  std::vector<double> lf_shift(static_cast<std::size_t>(m)), lf_base(static_cast<std::size_t>(m));
  std::size_t errors = 0;
  const std::size_t n_mc = draws.labels.size();
  for (std::size_t i = 0; i < n_mc; ++i) {
    const int z = draws.labels[i];
    for (int k = 0; k < m; ++k) {
      const double x = draws.noise[i * m + k] + (is_shifted(k, z, G) ? tau : 0.0);
      lf_shift[k] = noise_log_density(c.noise, x - tau);
      lf_base[k] = noise_log_density(c.noise, x);
    }
    int best = 0;
    double best_score = 0.0;
    for (int g = 0; g < G; ++g) {
      double score = log_prior[g];
      for (int k = 0; k < m; ++k) score += is_shifted(k, g, G) ? lf_shift[k] : lf_base[k];
      if (g == 0 || score > best_score) {
        best = g;
        best_score = score;
      }
    }
    if (best != z) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(n_mc);
}

}  // namespace

LabeledSample generate(const SimulationConfig& c, std::uint64_t seed) {
  if (!c.tau) throw std::invalid_argument("tau is unresolved; calibrate it from the target rate first");
  SimulationConfig checked = c;
  checked.target_miscl.reset();
  validate(checked);

  const int d = c.B * c.block_size;
  const double tau = *c.tau;
  std::mt19937_64 rng(seed);
  NoiseSampler noise(c.noise);
  std::vector<double> values(c.n * static_cast<std::size_t>(d));
  LabeledSample sample;
  sample.tau_used = tau;
  sample.true_omega.resize(static_cast<std::size_t>(d));
  sample.true_partitions.assignments.resize(static_cast<std::size_t>(c.B));
  for (int b = 0; b < c.B; ++b) {
    const auto p = block_proportions(c, b);
    std::discrete_distribution<int> label(p.begin(), p.end());
    auto& z = sample.true_partitions.assignments[b];
    z.resize(c.n);
    for (std::size_t i = 0; i < c.n; ++i) z[i] = label(rng);
    for (int k = 0; k < c.block_size; ++k) {
      const int j = b * c.block_size + k;
      sample.true_omega[j] = b;
      for (std::size_t i = 0; i < c.n; ++i) {
        const double shift = is_shifted(k, z[i], c.G[b]) ? tau : 0.0;
        values[i * d + j] = shift + noise(rng);
      }
    }
  }
  std::vector<std::string> names;
  for (int j = 0; j < d; ++j) names.push_back("x" + std::to_string(j + 1));
  sample.data = Dataset(c.n, static_cast<std::size_t>(d), std::move(values),
                        std::vector<ColumnType>(static_cast<std::size_t>(d)), std::move(names));
  return sample;
}

MonteCarloRate bayes_error_mc(const SimulationConfig& c, double tau, std::size_t n_mc, std::uint64_t seed,
                              int block) {
  if (block < 0 || block >= c.B) throw std::invalid_argument("block index out of range");
  if (n_mc == 0) throw std::invalid_argument("n_mc must be positive");
  const auto draws = draw_block(c, n_mc, seed, block);
  MonteCarloRate out;
  out.rate = misclassification(c, draws, tau, block);
  out.standard_error = std::sqrt(out.rate * (1.0 - out.rate) / static_cast<double>(n_mc));
  return out;
}

double calibrate_tau(const SimulationConfig& c, double target, const CalibrationOptions& options, int block) {
  if (block < 0 || block >= c.B || static_cast<int>(c.G.size()) != c.B)
    throw std::invalid_argument("block index out of range");
  const int G = c.G[block];
  const double ceiling = static_cast<double>(G - 1) / G;
  if (!(target > 0.0 && target < ceiling))
    throw std::invalid_argument("target misclassification rate must lie in (0, (G_b-1)/G_b)");
  if (c.block_size < 3) throw std::invalid_argument("block size must be >= 3");

  const auto draws = draw_block(c, options.n_mc, options.seed, block);
  auto rate = [&](double tau) { return misclassification(c, draws, tau, block); };

  if (std::abs(rate(0.0) - target) <= options.tol) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (rate(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericError("tau calibration did not bracket the target rate");
  }
  double mid = hi;
  for (int step = 0; step < options.max_steps; ++step) {
    mid = 0.5 * (lo + hi);
    const double r = rate(mid);
    if (std::abs(r - target) <= options.tol) return mid;
    if (r > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

SimulationConfig resolve_tau(SimulationConfig c, const CalibrationOptions& options) {
  validate(c);
  if (!c.tau) {
    c.tau = calibrate_tau(c, *c.target_miscl, options);
    c.target_miscl.reset();
  }
  return c;
}

}  // namespace mpclust
