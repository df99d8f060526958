#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mpclust/binning.hpp"
#include "mpclust/errors.hpp"
#include "mpclust/refinement.hpp"
#include "mpclust/selection_em.hpp"
#include "mpclust/simulation.hpp"

using namespace mpclust;

TEST_SUITE("refinement") {
  TEST_CASE("Silverman bandwidth on standard normal samples") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    const double target = 0.9 * std::pow(400.0, -0.2);
    CHECK(target == doctest::Approx(0.272).epsilon(0.01));
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> v(400);
      for (double& x : v) x = z(rng);
      CHECK(std::abs(silverman_bandwidth(v) / target - 1.0) < 0.15);
    }
    CHECK_THROWS_AS(silverman_bandwidth(std::vector<double>(10, 2.0)), DataError);
  }

  TEST_CASE("bandwidth scales with the data") {
    const std::vector<double> v{0.1, 0.7, -1.2, 2.4, 0.0, 1.1, -0.3, 0.9};
    std::vector<double> w;
    for (double x : v) w.push_back(3.0 * x + 5.0);
    CHECK(silverman_bandwidth(w) == doctest::Approx(3.0 * silverman_bandwidth(v)).epsilon(1e-12));
  }

  TEST_CASE("kde_eval examples") {
    const std::vector<double> one{0.0}, w1{1.0};
    CHECK(kde_eval(one, w1, 0.5, 0.0) == doctest::Approx(1.0 / (0.5 * std::sqrt(2 * std::numbers::pi))));
    const std::vector<double> pts{-1.0, 0.5, 2.0};
    const std::vector<double> eq{2.0, 2.0, 2.0};
    double manual = 0.0;
    for (double p : pts) manual += std::exp(-0.5 * std::pow((0.3 - p) / 0.7, 2)) / (0.7 * std::sqrt(2 * std::numbers::pi));
    CHECK(kde_eval(pts, eq, 0.7, 0.3) == doctest::Approx(manual / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(kde_eval(pts, std::vector<double>{0, 0, 0}, 0.7, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(kde_eval(pts, eq, 0.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("kde integrates to one and is translation equivariant") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pts(50), w(50), shifted(50);
    for (int i = 0; i < 50; ++i) pts[i] = z(rng), w[i] = u(rng), shifted[i] = pts[i] + 12.5;
    const double h = 0.4;
    double integral = 0.0;
    const double a = -8.0, b = 8.0;
    const int steps = 4000;
    for (int k = 0; k <= steps; ++k) {
      const double x = a + (b - a) * k / steps;
      const double f = kde_eval(pts, w, h, x);
      integral += (k == 0 || k == steps ? 0.5 : 1.0) * f * (b - a) / steps;
      CHECK(kde_eval(shifted, w, h, x + 12.5) == doctest::Approx(f).epsilon(1e-10));
    }
    CHECK(std::abs(integral - 1.0) < 1e-3);
  }

  TEST_CASE("G=1 refinement is the identity") {
    const std::vector<std::vector<double>> cols{{0.1, 0.5, 0.9, 1.3}, {2.0, 1.0, 3.0, 0.0}};
    const auto out = refine_block(cols, 1, Matrix(4, 1, 1.0), RefineConfig{});
    CHECK(out.converged);
    CHECK(out.partition == std::vector<int>(4, 0));
    CHECK(out.pi == std::vector<double>{1.0});
    for (double t : out.responsibilities.data) CHECK(t == 1.0);
  }

  TEST_CASE("well separated clusters keep their partition") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> z;
    const int n = 200;
    std::vector<std::vector<double>> cols(2, std::vector<double>(n));
    Matrix init(n, 2);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      labels[i] = i < n / 2 ? 0 : 1;
      for (auto& c : cols) c[i] = z(rng) + 6.0 * labels[i];
      init(i, labels[i]) = 1.0;
    }
    const auto out = refine_block(cols, 2, init, RefineConfig{});
    CHECK(out.partition == labels);
    for (std::size_t i = 0; i < out.responsibilities.rows; ++i)
      CHECK(out.responsibilities(i, 0) + out.responsibilities(i, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(out.pi[0] + out.pi[1] == doctest::Approx(1.0));
    CHECK(out.pi[0] == doctest::Approx(0.5).epsilon(0.05));
  }

  TEST_CASE("empty initial component falls back without failing") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> z;
    const int n = 60;
    std::vector<std::vector<double>> cols(1, std::vector<double>(n));
    for (double& x : cols[0]) x = z(rng);
    Matrix init(n, 2);
    for (int i = 0; i < n; ++i) init(i, 0) = 1.0;
    RefineConfig cfg;
    cfg.max_iterations = 20;
    const auto out = refine_block(cols, 2, init, cfg);
    for (double p : out.pi) {
      CHECK(p >= 0.0);
      CHECK(std::isfinite(p));
    }
    CHECK(out.pi[0] + out.pi[1] == doctest::Approx(1.0));
  }

  TEST_CASE("refine_fit keeps the structure and checks shapes") {
    SimulationConfig sc;
    sc.B = 2;
    sc.G = {2, 2};
    sc.block_size = 3;
    sc.n = 150;
    sc.tau = 2.5;
    const auto sample = generate(sc, 4);
    const auto disc = discretize(sample.data, build_scheme(sample.data, 3));
    EMConfig em;
    em.n_restarts = 4;
    const auto sel = select_model(disc, CandidateGrid::enumerate(2, 2), em);
    const auto blocks = refine_fit(sample.data, sel.best, RefineConfig{});
    REQUIRE(static_cast<int>(blocks.size()) == sel.best.structure.B);
    for (int b = 0; b < sel.best.structure.B; ++b) {
      CHECK(blocks[b].responsibilities.cols == static_cast<std::size_t>(sel.best.structure.G[b]));
      CHECK(blocks[b].partition.size() == sc.n);
    }
    const auto parallel = refine_fit(sample.data, sel.best, RefineConfig{}, 3);
    for (std::size_t b = 0; b < blocks.size(); ++b) CHECK(parallel[b].responsibilities == blocks[b].responsibilities);
    const Dataset narrow(2, 3, {1, 2, 3, 4, 5, 6}, std::vector<ColumnType>(3));
    CHECK_THROWS_AS(refine_fit(narrow, sel.best, RefineConfig{}), DataError);
  }
}
