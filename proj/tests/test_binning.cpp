#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mpclust/binning.hpp"
#include "mpclust/errors.hpp"

using namespace mpclust;

namespace {

Dataset single_column(std::vector<double> v) {
  const std::size_t n = v.size();
  return Dataset(n, 1, std::move(v), std::vector<ColumnType>(1));
}

}  // namespace

TEST_SUITE("binning") {
  TEST_CASE("choose_num_bins examples") {
    CHECK(choose_num_bins(400, 4) == 4);
    CHECK(choose_num_bins(50, 7) == 2);
    CHECK(choose_num_bins(200, 5) == 2);
    CHECK(choose_num_bins(400, 6) == 2);
    CHECK(choose_num_bins(10000, 4) == 10);  // exact root must not round down
    CHECK(choose_num_bins(15, 4) == 2);
    CHECK_THROWS_AS(choose_num_bins(100, 0), std::invalid_argument);
  }

  TEST_CASE("default bin policies satisfy R ln^2(n) / sqrt(n) decreasing") {
    // ln^2(n) / n^(1/2 - 1/k) only turns downward once ln n > 4k / (k - 2); for
    // k = 4 that is n > e^8, so the check starts at 1e5.
    for (int k = 4; k <= 6; ++k) {
      double previous = INFINITY;
      for (double n : {1e5, 1e6, 1e7, 1e8}) {
        const double v = choose_num_bins(static_cast<std::size_t>(n), k) * std::pow(std::log(n), 2) / std::sqrt(n);
        CHECK(v < previous);
        previous = v;
      }
    }
  }

  TEST_CASE("median split of four points") {
    const std::vector<double> column{1, 2, 3, 4};
    const auto bins = build_bins(column, 2);
    REQUIRE(bins.R() == 2);
    CHECK(bins.boundaries[1] == doctest::Approx(2.5));
    int counts[2] = {0, 0};
    for (double x : column) ++counts[bin_index(bins, x)];
    CHECK(counts[0] == 2);
    CHECK(counts[1] == 2);
  }

  TEST_CASE("constant column is rejected") {
    CHECK_THROWS_WITH_AS(build_bins(std::vector<double>(5, 0.0), 3), "constant column", DataError);
  }

  TEST_CASE("uniform sample gives quarter-width bins") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> column(10000);
    for (double& x : column) x = u(rng);
    const auto bins = build_bins(column, 4);
    REQUIRE(bins.R() == 4);
    for (double m : bins.measures) CHECK(std::abs(m - 0.25) < 0.02);
  }

  TEST_CASE("half-open bins with the last bin closed") {
    VariableBins bins;
    bins.boundaries = {0.0, 0.5, 1.0};
    bins.measures = {0.5, 0.5};
    CHECK(bin_index(bins, 0.3) == 0);
    CHECK(bin_index(bins, 0.5) == 1);
    CHECK(bin_index(bins, 1.0) == 1);
    CHECK(bin_index(bins, 0.0) == 0);
    CHECK(bin_index(bins, -3.0) == 0);
    CHECK(bin_index(bins, 7.0) == 1);
  }

  TEST_CASE("categorical levels pass through unchanged") {
    const Dataset data(4, 2, {3, 0.1, 1, 0.2, 2, 0.3, 3, 0.4}, {ColumnType::categorical(3), ColumnType::continuous()});
    const auto scheme = build_scheme(data, 2);
    CHECK(scheme.variables[0].categorical);
    CHECK(scheme.variables[0].measures == std::vector<double>{1, 1, 1});
    const auto disc = discretize(data, scheme);
    CHECK(disc.codes[0] == std::vector<int>{2, 0, 1, 2});
    CHECK(disc.R(0) == 3);
    CHECK(disc.R(1) == 2);
  }

  TEST_CASE("bins partition the widened support and balance counts") {
    std::mt19937_64 rng(19);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 50 + 37 * trial;
      const int R = 2 + trial % 6;
      std::vector<double> v(n);
      for (double& x : v) x = z(rng);
      const auto bins = build_bins(v, R);
      REQUIRE(bins.R() == R);
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      const double range = *hi - *lo;
      double total = 0.0;
      for (double m : bins.measures) total += m;
      CHECK(total == doctest::Approx(range * (1 + 2e-9)).epsilon(1e-12));
      std::vector<std::size_t> counts(static_cast<std::size_t>(R), 0);
      for (double x : v) {
        const int r = bin_index(bins, x);
        REQUIRE(r >= 0);
        REQUIRE(r < R);
        CHECK(x >= bins.boundaries[r]);
        CHECK(x <= bins.boundaries[r + 1]);
        ++counts[r];
      }
      const auto [cmin, cmax] = std::minmax_element(counts.begin(), counts.end());
      const std::size_t slack = (n % R != 0) ? 1 : 0;
      CHECK(*cmax - *cmin <= slack);
    }
  }

  TEST_CASE("tied quantiles merge boundaries") {
    std::vector<double> v(20, 1.0);
    v.push_back(2.0);
    v.push_back(3.0);
    const auto bins = build_bins(v, 4);
    CHECK(bins.R() < 4);
    CHECK(bins.R() >= 1);
    CHECK(std::is_sorted(bins.boundaries.begin(), bins.boundaries.end()));
    CHECK(std::adjacent_find(bins.boundaries.begin(), bins.boundaries.end()) == bins.boundaries.end());
  }

  TEST_CASE("type-7 quantile") {
    const std::vector<double> s{1, 2, 3, 4, 5};
    CHECK(empirical_quantile(s, 0.0) == 1);
    CHECK(empirical_quantile(s, 1.0) == 5);
    CHECK(empirical_quantile(s, 0.5) == 3);
    CHECK(empirical_quantile(s, 0.1) == doctest::Approx(1.4));
  }

  TEST_CASE("discretize rejects mismatched schemes") {
    const auto a = single_column({1, 2, 3, 4});
    const Dataset two(2, 2, {1, 2, 3, 4}, std::vector<ColumnType>(2));
    const auto scheme = build_scheme(a, 2);
    CHECK_THROWS_AS(discretize(two, scheme), DataError);
    const Dataset cat(4, 1, {1, 2, 1, 2}, {ColumnType::categorical(2)});
    CHECK_THROWS_AS(discretize(cat, scheme), DataError);
  }
}
