#include <cmath>
#include <vector>

#include "doctest.h"
#include "qspec/indicator.hpp"
#include "qspec/rng.hpp"

using namespace qspec;

namespace {
Series gaussian_series(int T, std::uint64_t seed) {
  Rng r(seed);
  Series s;
  s.values.resize(T);
  for (auto& v : s.values) v = r.gaussian();
  return s;
}
}  // namespace

TEST_CASE("series validation") {
  Series s{{1, 2, 3}, "short"};
  CHECK_THROWS(s.validate_for_estimation());
  Series nan{{1, 2, 3, 4, 5, 6, 7, NAN}, "nan"};
  CHECK_THROWS(nan.validate_for_estimation());
  Series ok{{1, 2, 3, 4, 5, 6, 7, 8}, "ok"};
  CHECK_NOTHROW(ok.validate_for_estimation());
}

TEST_CASE("default levels are 0.05..0.95 by 0.05") {
  auto lv = default_levels();
  REQUIRE(lv.size() == 19);
  CHECK(lv.front() == doctest::Approx(0.05));
  CHECK(lv.back() == doctest::Approx(0.95));
  CHECK(lv[9] == doctest::Approx(0.5));
}

TEST_CASE("empirical grid uses the right-continuous quantile") {
  Series s{{5, 1, 3, 2, 4, 6, 8, 7, 9, 10}, "x"};
  auto g = empirical_grid(s, {0.1, 0.25, 0.5, 0.75});
  CHECK(g.thresholds == std::vector<double>{1, 3, 5, 8});
  CHECK(g.levels == std::vector<double>{0.1, 0.25, 0.5, 0.75});
  CHECK(g.score_weight(0) == 0.0);
  CHECK(g.score_weight(2) == doctest::Approx(0.25));
}

TEST_CASE("tied empirical quantiles are rejected") {
  Series s{{1, 1, 1, 1, 1, 1, 2, 3}, "ties"};
  CHECK_THROWS(empirical_grid(s, {0.1, 0.2, 0.3}));
}

TEST_CASE("panel columns are exactly centered") {
  auto s = gaussian_series(97, 12);
  auto g = empirical_grid(s, default_levels());
  auto p = build_panel(s, g);
  REQUIRE(p.T == 97);
  REQUIRE(p.q == 19);
  for (int i = 0; i < p.q; ++i) {
    double col = 0.0;
    for (int t = 0; t < p.T; ++t) col += p.at(t, i);
    CHECK(std::abs(col) < 1e-12);
    CHECK(p.fhat[i] == doctest::Approx(empirical_cdf(s, g.thresholds[i])));
  }
}

TEST_CASE("rank transform handles ties and monotone invariance") {
  Series s{{3, 1, 4, 1, 5, 9, 2, 6}, "x"};
  auto r = rank_transform(s);
  CHECK(r[1] == doctest::Approx(2.0 / 8));  // both 1s get rank<= count 2
  CHECK(r[3] == doctest::Approx(2.0 / 8));
  CHECK(r[5] == doctest::Approx(1.0));
  Series t = s;
  for (auto& v : t.values) v = std::exp(v);
  CHECK(rank_transform(t) == r);
}

TEST_CASE("fft covariances match the direct sum") {
  auto s = gaussian_series(211, 77);
  auto g = empirical_grid(s, {0.1, 0.3, 0.5, 0.7, 0.9});
  auto p = build_panel(s, g);
  const int M = 25;
  auto fast = quantile_cov_all(p, M);
  auto slow = quantile_cov_naive(p, M);
  for (int r = 0; r <= M; ++r)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        CHECK(std::abs(fast.at(r, i, j) - slow.at(r, i, j)) < 1e-10);
}

TEST_CASE("lag-zero diagonal equals Fhat(1-Fhat) bit for bit") {
  auto s = gaussian_series(256, 5);
  auto g = empirical_grid(s, default_levels());
  auto p = build_panel(s, g);
  auto c = quantile_cov_all(p, 16);
  for (int i = 0; i < p.q; ++i) {
    double f = p.fhat[i];
    CHECK(c.at(0, i, i) == f * (1.0 - f));
  }
}

TEST_CASE("negative lags transpose the pair") {
  auto s = gaussian_series(128, 31);
  auto g = empirical_grid(s, {0.25, 0.5, 0.75});
  auto c = quantile_cov_all(build_panel(s, g), 10);
  CHECK(c.at(-4, 0, 2) == c.at(4, 2, 0));
  CHECK(c.at(-7, 1, 0) == c.at(7, 0, 1));
}

TEST_CASE("max_lag must stay below the sample size") {
  auto s = gaussian_series(32, 1);
  auto g = empirical_grid(s, {0.5});
  auto p = build_panel(s, g);
  CHECK_THROWS(quantile_cov_all(p, 32));
  CHECK_NOTHROW(quantile_cov_all(p, 31));
}
