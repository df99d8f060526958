#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mpclust/errors.hpp"
#include "mpclust/likelihood.hpp"
#include "mpclust/selection_em.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mpclust;
using testing_support::random_discrete;
using testing_support::random_params;
using testing_support::structured_discrete;
using testing_support::to_oracle;

namespace {

DiscretizedData unit_data(const std::vector<std::vector<int>>& cols, int R) {
  DiscretizedData disc;
  disc.n = cols.front().size();
  disc.codes = cols;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    VariableBins v;
    v.categorical = true;
    v.measures.assign(static_cast<std::size_t>(R), 1.0);
    disc.scheme.variables.push_back(v);
  }
  return disc;
}

Responsibilities hard(const std::vector<std::vector<int>>& labels, const std::vector<int>& G) {
  Responsibilities r;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    Matrix t(labels[b].size(), static_cast<std::size_t>(G[b]));
    for (std::size_t i = 0; i < labels[b].size(); ++i) t(i, labels[b][i]) = 1.0;
    r.t.push_back(t);
  }
  return r;
}

double objective(const std::vector<double>& w, const std::vector<double>& u) { return oracle::weighted_log(w, u); }

}  // namespace

TEST_SUITE("selection_em") {
  TEST_CASE("candidate grid enumerates non-decreasing G tuples") {
    const auto grid = CandidateGrid::enumerate(3, 3);
    CHECK(grid.candidates.size() == 19);  // 3 + 6 + 10
    for (const auto& c : grid.candidates) {
      CHECK(static_cast<int>(c.G.size()) == c.B);
      CHECK(std::is_sorted(c.G.begin(), c.G.end()));
    }
    CHECK(CandidateGrid::enumerate(2, 2).candidates.size() == 5);
    CHECK(CandidateGrid::enumerate(1, 1).candidates.size() == 1);
  }

  TEST_CASE("e_step examples") {
    const auto disc = unit_data({{0, 1}}, 2);
    DiscreteParameters p;
    p.pi = {{0.5, 0.5}};
    p.alpha = {{0.8, 0.2, 0.2, 0.8}};
    const ModelStructure s{1, {2}, {0}};
    const auto r = e_step(disc, s, p);
    CHECK(r.t[0](0, 0) == doctest::Approx(0.8));
    CHECK(r.t[0](0, 1) == doctest::Approx(0.2));
    CHECK(r.t[0](1, 0) == doctest::Approx(0.2));

    p.alpha = {{0.3, 0.7, 0.3, 0.7}};
    const auto same = e_step(disc, s, p);
    CHECK(same.t[0](0, 0) == doctest::Approx(0.5));
    CHECK(same.t[0](1, 1) == doctest::Approx(0.5));

    DiscreteParameters one;
    one.pi = {{1.0}};
    one.alpha = {{0.3, 0.7}};
    const auto single = e_step(disc, ModelStructure{1, {1}, {0}}, one);
    CHECK(single.t[0](0, 0) == 1.0);
    CHECK(single.t[0](1, 0) == 1.0);
  }

  TEST_CASE("e_step rows sum to one and loglik matches") {
    std::mt19937_64 rng(8);
    const std::vector<int> R{3, 4, 2, 3, 5, 2};
    const ModelStructure s{2, {3, 2}, {0, 1, 0, 1, 0, 1}};
    const auto disc = random_discrete(rng, 60, R);
    const auto p = random_params(rng, s, R);
    const auto es = e_step_with_loglik(disc, s, p);
    for (const auto& t : es.resp.t)
      for (std::size_t i = 0; i < t.rows; ++i) {
        double sum = 0.0;
        for (double v : t.row(i)) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
      }
    CHECK(es.loglik == doctest::Approx(log_likelihood(disc, s, p)).epsilon(1e-13));
  }

  TEST_CASE("m_step_parameters counting example and uniform responsibilities") {
    const auto disc = unit_data({{0, 0, 0, 1}}, 2);
    const std::vector<int> G{1};
    const auto p = m_step_parameters(disc, hard({{0, 0, 0, 0}}, G), std::vector<int>{0}, G, 1e-6);
    CHECK(p.alpha[0][0] == doctest::Approx(0.75));
    CHECK(p.alpha[0][1] == doctest::Approx(0.25));

    Responsibilities flat;
    flat.t.push_back(Matrix(4, 3, 1.0 / 3));
    const std::vector<int> G3{3};
    const auto q = m_step_parameters(disc, flat, std::vector<int>{0}, G3, 1e-6);
    for (double v : q.pi[0]) CHECK(v == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("clamping a zero entry") {
    const std::vector<double> w{3.0, 0.0, 1.0};
    const auto u = clamped_simplex_argmax(w, 1e-4);
    CHECK(u[1] == doctest::Approx(1e-4));
    CHECK(u[0] + u[2] == doctest::Approx(1.0 - 1e-4));
    CHECK(u[0] / u[2] == doctest::Approx(3.0));
    const auto uniform = clamped_simplex_argmax(std::vector<double>{0.0, 0.0}, 1e-4);
    CHECK(uniform == std::vector<double>{0.5, 0.5});
  }

  TEST_CASE("clamped maximizer agrees with the bisection and gradient oracles") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      const int K = std::uniform_int_distribution<int>(2, 6)(rng);
      const double eps = std::pow(10.0, -std::uniform_real_distribution<double>(1.0, 5.0)(rng)) / K;
      std::vector<double> w(K);
      for (double& x : w) x = u(rng) < 0.3 ? u(rng) * 1e-3 : u(rng) * 20.0;
      const auto got = clamped_simplex_argmax(w, eps);
      const auto ref = oracle::clamped_argmax_bisect(w, eps);
      double sum = 0.0;
      for (int k = 0; k < K; ++k) {
        CHECK(got[k] >= eps * (1 - 1e-12));
        CHECK(std::abs(got[k] - ref[k]) < 1e-9);
        sum += got[k];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(clamped_simplex_max(w, eps) == doctest::Approx(objective(w, got)).epsilon(1e-13));
      const auto pg = oracle::projected_gradient_argmax(w, eps);
      CHECK(objective(w, got) >= objective(w, pg) - 1e-9);
    }
  }

  TEST_CASE("unclamped closed form matches numerical maximization") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(1.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> w(4);
      for (double& x : w) x = u(rng);
      const double total = w[0] + w[1] + w[2] + w[3];
      const auto got = clamped_simplex_argmax(w, 1e-8);
      const auto pg = oracle::projected_gradient_argmax(w, 1e-8);
      for (int k = 0; k < 4; ++k) {
        CHECK(got[k] == doctest::Approx(w[k] / total).epsilon(1e-12));
        CHECK(std::abs(got[k] - pg[k]) < 1e-6);
      }
    }
  }

  TEST_CASE("m_step_variables criteria agree with a brute-force evaluation") {
    std::mt19937_64 rng(101);
    const int n = 200;
    // block 1: labels z1, block 2: labels z2; variable 4 copies z2 with noise.
    std::vector<int> z1(n), z2(n);
    for (int i = 0; i < n; ++i) z1[i] = i % 2, z2[i] = (i / 2) % 2;
    std::vector<std::vector<int>> cols(5, std::vector<int>(n));
    std::bernoulli_distribution flip(0.1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) cols[j][i] = z1[i] ^ flip(rng);
      for (int j = 2; j < 4; ++j) cols[j][i] = z2[i] ^ flip(rng);
      cols[4][i] = z2[i] ^ flip(rng);
    }
    const auto disc = unit_data(cols, 2);
    const std::vector<int> G{2, 2};
    const auto resp = hard({z1, z2}, G);
    const double eps = 1e-5;
    const auto va = m_step_variables(disc, resp, G, PenaltySpec::bic(), eps);
    CHECK(va.omega[4] == 1);
    CHECK(va.omega == std::vector<int>{0, 0, 1, 1, 1});
    for (int j = 0; j < 5; ++j)
      for (int b = 0; b < 2; ++b) {
        double crit = 0.0;
        for (int g = 0; g < 2; ++g) {
          std::vector<double> w(2, 0.0);
          for (int i = 0; i < n; ++i) w[cols[j][i]] += resp.t[b](i, g);
          crit += objective(w, oracle::projected_gradient_argmax(w, eps));
        }
        crit -= (2 - 1) * 2 * std::log(static_cast<double>(n)) / 2;
        CHECK(va.criteria[j][b] == doctest::Approx(crit).epsilon(1e-9));
      }
  }

  TEST_CASE("m_step_variables with one block or identical blocks assigns block 1") {
    std::mt19937_64 rng(4);
    const auto disc = random_discrete(rng, 50, {3, 3, 3, 3});
    const auto r = e_step(disc, ModelStructure{1, {2}, {0, 0, 0, 0}},
                          random_params(rng, ModelStructure{1, {2}, {0, 0, 0, 0}}, {3, 3, 3, 3}));
    const std::vector<int> G1{2};
    CHECK(m_step_variables(disc, r, G1, PenaltySpec::bic(), 1e-5).omega == std::vector<int>(4, 0));
    Responsibilities twice{{r.t[0], r.t[0]}};
    const std::vector<int> G2{2, 2};
    CHECK(m_step_variables(disc, twice, G2, PenaltySpec::bic(), 1e-5).omega == std::vector<int>(4, 0));
  }

  TEST_CASE("init_random contracts") {
    std::mt19937_64 rng(6);
    const auto disc = random_discrete(rng, 40, std::vector<int>(6, 3));
    const std::vector<int> G1{2};
    CHECK(init_random(disc, 1, G1, 1e-4, 99).structure.omega == std::vector<int>(6, 0));
    const std::vector<int> G2{2, 3};
    const auto a = init_random(disc, 2, G2, 1e-4, 5);
    const auto b = init_random(disc, 2, G2, 1e-4, 5);
    CHECK(a.structure == b.structure);
    CHECK(a.params == b.params);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const auto st = init_random(disc, 2, G2, 1e-4, seed);
      const auto sizes = st.structure.block_sizes();
      REQUIRE(sizes[0] > 0);
      REQUIRE(sizes[1] > 0);
    }
    for (const auto& row : a.params.alpha)
      for (double v : row) CHECK(v >= 1e-4);
    const auto three = random_discrete(rng, 10, {2, 2});
    const std::vector<int> G3{1, 1, 1};
    CHECK_THROWS_AS(init_random(three, 3, G3, 1e-4, 1), std::invalid_argument);
  }

  TEST_CASE("B=1, G=(1) reaches the saturated independence fit") {
    std::mt19937_64 rng(12);
    const std::vector<int> R{2, 3, 4};
    const auto disc = random_discrete(rng, 90, R);
    EMConfig cfg;
    const std::vector<int> G{1};
    const auto fit = run_em(disc, 1, G, cfg, 3);
    CHECK(fit.converged);
    CHECK(fit.params.pi[0][0] == doctest::Approx(1.0));
    double ll = 0.0;
    for (int j = 0; j < 3; ++j) {
      std::vector<double> c(R[j], 0.0);
      for (int code : disc.codes[j]) c[code] += 1.0;
      for (int r = 0; r < R[j]; ++r) {
        CHECK(fit.params.alpha[j][r] == doctest::Approx(c[r] / 90.0).epsilon(1e-12));
        if (c[r] > 0) ll += c[r] * (std::log(c[r] / 90.0) - std::log(disc.scheme.variables[j].measures[r]));
      }
    }
    CHECK(fit.loglik == doctest::Approx(ll).epsilon(1e-12));
    CHECK(fit.objective_trace[1] == doctest::Approx(fit.penalized_loglik).epsilon(1e-14));
  }

  TEST_CASE("ascent on random instances") {
    std::mt19937_64 rng(2024);
    for (int run = 0; run < 100; ++run) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(30, 120)(rng);
      const int d = std::uniform_int_distribution<int>(3, 10)(rng);
      std::vector<int> R(d);
      for (int& r : R) r = std::uniform_int_distribution<int>(2, 5)(rng);
      const int B = std::uniform_int_distribution<int>(1, std::min(3, d))(rng);
      std::vector<int> G(B);
      for (int& g : G) g = std::uniform_int_distribution<int>(1, 3)(rng);
      const auto disc = random_discrete(rng, n, R);
      EMConfig cfg;
      cfg.max_iterations = 200;
      const auto fit = run_em(disc, B, G, cfg, rng());
      for (std::size_t k = 1; k < fit.objective_trace.size(); ++k)
        REQUIRE(fit.objective_trace[k] >= fit.objective_trace[k - 1] - 1e-8);
    }
  }

  TEST_CASE("permuting initial component labels leaves the trajectory unchanged") {
    std::mt19937_64 rng(55);
    const std::vector<int> R(6, 3);
    const ModelStructure truth{2, {3, 2}, {0, 0, 0, 1, 1, 1}};
    const auto disc = structured_discrete(rng, 150, truth, R);
    EMConfig cfg;
    cfg.max_iterations = 60;
    const std::vector<int> G{3, 2};
    auto state = init_random(disc, 2, G, resolve_epsilon(cfg, disc), 17);
    auto permuted = state;
    const std::vector<int> perm{2, 0, 1};
    for (int g = 0; g < 3; ++g) permuted.params.pi[0][g] = state.params.pi[0][perm[g]];
    for (int j = 0; j < 6; ++j) {
      if (state.structure.omega[j] != 0) continue;
      for (int g = 0; g < 3; ++g)
        for (int r = 0; r < 3; ++r) permuted.params.alpha[j][g * 3 + r] = state.params.alpha_at(j, perm[g], r, 3);
    }
    const auto a = run_em_from(disc, state, cfg, PenaltySpec::bic());
    const auto b = run_em_from(disc, permuted, cfg, PenaltySpec::bic());
    REQUIRE(a.objective_trace.size() == b.objective_trace.size());
    for (std::size_t k = 0; k < a.objective_trace.size(); ++k)
      CHECK(a.objective_trace[k] == doctest::Approx(b.objective_trace[k]).epsilon(1e-10));
    CHECK(a.structure == b.structure);
    for (int g = 0; g < 3; ++g) CHECK(b.params.pi[0][g] == doctest::Approx(a.params.pi[0][perm[g]]).epsilon(1e-8));
  }

  TEST_CASE("prune_empty_blocks semantics") {
    std::mt19937_64 rng(90);
    const std::vector<int> R(6, 3);
    const auto disc = random_discrete(rng, 50, R);
    EMConfig cfg;
    cfg.max_iterations = 1;
    const ModelStructure s{3, {2, 3, 1}, {0, 0, 2, 0, 2, 2}};
    EMState state{s, random_params(rng, s, R)};
    auto fit = run_em_from(disc, state, cfg, PenaltySpec::bic(), true);
    const auto pruned = prune_empty_blocks(fit, disc.n, R, PenaltySpec::bic());
    CHECK(pruned.structure.B == 2);
    CHECK(pruned.structure.G == std::vector<int>{2, 1});
    CHECK(pruned.structure.omega == std::vector<int>{0, 0, 1, 0, 1, 1});
    CHECK(pruned.loglik == fit.loglik);
    CHECK(pruned.penalty < fit.penalty);
    CHECK(pruned.responsibilities.t.size() == 2);
    CHECK(pruned.params.pi.size() == 2);
    CHECK(pruned.penalized_loglik == doctest::Approx(pruned.loglik - penalty(PenaltySpec::bic(), 50, pruned.structure, R).total));

    const auto again = prune_empty_blocks(pruned, disc.n, R, PenaltySpec::bic());
    CHECK(again == pruned);

    const ModelStructure one{3, {2, 2, 2}, std::vector<int>(6, 1)};
    auto f1 = run_em_from(disc, EMState{one, random_params(rng, one, R)}, cfg, PenaltySpec::bic(), true);
    const auto p1 = prune_empty_blocks(f1, disc.n, R, PenaltySpec::bic());
    CHECK(p1.structure.B == 1);
    CHECK(p1.structure.omega == std::vector<int>(6, 0));
  }

  TEST_CASE("single-candidate grid returns the closed-form fit") {
    std::mt19937_64 rng(14);
    const auto disc = random_discrete(rng, 60, std::vector<int>(4, 3));
    EMConfig cfg;
    cfg.n_restarts = 3;
    const auto sel = select_model(disc, CandidateGrid::enumerate(1, 1), cfg);
    CHECK(sel.best.structure.B == 1);
    CHECK(sel.best.structure.G == std::vector<int>{1});
    const std::vector<int> G{1};
    CHECK(sel.best.penalized_loglik == doctest::Approx(run_em(disc, 1, G, cfg, 0).penalized_loglik).epsilon(1e-13));
  }

  TEST_CASE("best-of-restarts beats the generating structure's fit") {
    std::mt19937_64 rng(30);
    const ModelStructure truth{2, {2, 2}, {0, 0, 0, 1, 1, 1}};
    const std::vector<int> R(6, 2);
    for (int rep = 0; rep < 5; ++rep) {
      const auto disc = structured_discrete(rng, 30, truth, R);
      EMConfig cfg;
      cfg.n_restarts = 10;
      cfg.master_seed = rep;
      const auto sel = select_model(disc, CandidateGrid::enumerate(2, 2), cfg);
      const double eps = resolve_epsilon(cfg, disc);
      double truth_obj = -INFINITY;
      for (int r = 0; r < 10; ++r) {
        auto st = init_random(disc, 2, truth.G, eps, 1000 + r);
        st.structure.omega = truth.omega;
        truth_obj = std::max(truth_obj, run_em_from(disc, st, cfg, PenaltySpec::bic(), true).penalized_loglik);
      }
      CHECK(sel.best.penalized_loglik >= truth_obj - 1e-6);
    }
  }

  TEST_CASE("independent variables select B=1, G=(1) at n=1000") {
    std::mt19937_64 rng(66);
    const auto disc = random_discrete(rng, 1000, std::vector<int>(6, 4));
    EMConfig cfg;
    cfg.n_restarts = 5;
    const auto sel = select_model(disc, CandidateGrid::enumerate(2, 2), cfg);
    CHECK(sel.best.structure.B == 1);
    CHECK(sel.best.structure.G == std::vector<int>{1});
  }

  TEST_CASE("selection is identical across thread counts") {
    std::mt19937_64 rng(3);
    const ModelStructure truth{2, {2, 3}, {0, 1, 0, 1, 0, 1, 0}};
    const auto disc = structured_discrete(rng, 80, truth, std::vector<int>(7, 3));
    EMConfig cfg;
    cfg.n_restarts = 4;
    cfg.master_seed = 8;
    cfg.threads = 1;
    const auto a = select_model(disc, CandidateGrid::enumerate(2, 3), cfg);
    cfg.threads = 4;
    const auto b = select_model(disc, CandidateGrid::enumerate(2, 3), cfg);
    CHECK(a.best == b.best);
    CHECK(a.selected_candidate == b.selected_candidate);
  }

  TEST_CASE("ranking prefers admissible fits and earlier ties") {
    CHECK(ranks_above(true, -100.0, false, -10.0));
    CHECK_FALSE(ranks_above(false, -10.0, true, -100.0));
    CHECK(ranks_above(true, -10.0, true, -11.0));
    CHECK_FALSE(ranks_above(true, -10.0, true, -10.0 * (1 + 1e-12)));
  }

  TEST_CASE("epsilon validation") {
    std::mt19937_64 rng(1);
    const auto disc = random_discrete(rng, 10, {4, 4, 4});
    EMConfig cfg;
    CHECK(resolve_epsilon(cfg, disc) == doctest::Approx(1.0 / 400));
    cfg.epsilon = 0.3;
    CHECK_THROWS_AS(resolve_epsilon(cfg, disc), std::invalid_argument);
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(resolve_epsilon(cfg, disc), std::invalid_argument);
    cfg.epsilon.reset();
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(resolve_epsilon(cfg, disc), std::invalid_argument);
  }
}
