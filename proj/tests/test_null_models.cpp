#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "qspec/null_models.hpp"
#include "qspec/rng.hpp"
#include "qspec/stats.hpp"

using namespace qspec;

TEST_CASE("parameter validation") {
  CHECK_THROWS(NullModel::ar1(0, 1.0, 1));
  CHECK_THROWS(NullModel::ar1(0, 0.5, 0));
  CHECK_THROWS(NullModel::arch1(0, 0, 0.5));
  CHECK_THROWS(NullModel::arch1(0, 0.4, 1.0));
  CHECK_THROWS(NullModel::garch11(0, 0.1, 0.5, 0.5));
  CHECK_THROWS(NullModel::squared_arch1(0.4, 0.58));  // 3a^2 > 1
  CHECK_NOTHROW(NullModel::squared_arch1(0.4, 0.55));
}

TEST_CASE("presets and json round trip") {
  auto g = NullModel::preset("msft-garch");
  CHECK(g.mu == doctest::Approx(1.56e-3));
  CHECK(g.b == doctest::Approx(0.925));
  auto a = NullModel::preset("intel-arch");
  CHECK(a.a1 == doctest::Approx(0.363));
  CHECK_THROWS(NullModel::preset("nope"));
  for (auto m : {g, a, NullModel::ar1(0.1, 0.5, 2), NullModel::squared_arch1(0.4, 0.5)}) {
    auto back = NullModel::from_json(m.to_json());
    CHECK(back.to_json() == m.to_json());
  }
}

TEST_CASE("simulation is deterministic and respects known moments") {
  auto m = NullModel::ar1(0, 0.9, 1);
  auto s1 = simulate(m, 1000, 42);
  auto s2 = simulate(m, 1000, 42);
  CHECK(s1.values == s2.values);

  const int N = 1000000;
  auto s = simulate(m, N, 7);
  double mu = mean(s.values);
  double num = 0, den = 0;
  for (int t = 0; t + 1 < N; ++t) {
    num += (s.values[t] - mu) * (s.values[t + 1] - mu);
    den += (s.values[t] - mu) * (s.values[t] - mu);
  }
  CHECK(num / den == doctest::Approx(0.9).epsilon(0.006));

  auto iid = simulate(NullModel::iid(0, 1), 100000, 3);
  CHECK(std::abs(mean(iid.values)) < 0.02);

  // var = a0/(1-a1); tight check where E X^4 exists (3 a1^2 < 1), loose at
  // a1 = 0.9 where the sample variance itself is heavy-tailed.
  auto arch = simulate(NullModel::arch1(0, 1.0, 0.5), N, 11);
  CHECK(variance(arch.values) == doctest::Approx(2.0).epsilon(0.03));
  auto heavy = simulate(NullModel::arch1(0, 1.0 / 1.9, 0.9), N, 11);
  CHECK(variance(heavy.values) == doctest::Approx(1.0 / 1.9 / 0.1).epsilon(0.5));
}

TEST_CASE("bivariate normal cdf") {
  CHECK(bivariate_normal_cdf(0, 0, 0) == doctest::Approx(0.25).epsilon(1e-10));
  // arcsin identity at the median
  for (double rho : {-0.95, -0.5, 0.3, 0.5, 0.93, 0.99}) {
    CHECK(bivariate_normal_cdf(0, 0, rho) ==
          doctest::Approx(0.25 + std::asin(rho) / (2 * M_PI)).epsilon(1e-7));
  }
  CHECK(bivariate_normal_cdf(INFINITY, 0.7, 0.4) == doctest::Approx(normal_cdf(0.7)));
  CHECK(bivariate_normal_cdf(-INFINITY, 0.7, 0.4) == 0.0);
  CHECK(bivariate_normal_cdf(0.3, 0.8, 1.0) == doctest::Approx(normal_cdf(0.3)));
  CHECK(bivariate_normal_cdf(0.3, 0.8, -1.0) ==
        doctest::Approx(normal_cdf(0.3) + normal_cdf(0.8) - 1));
  CHECK_THROWS(bivariate_normal_cdf(0, 0, 1.5));

  // Monte Carlo oracle at general arguments, including |rho| > 0.925.
  Rng rng(99);
  for (auto [h, k, rho] : {std::tuple{0.5, -0.3, 0.7}, {1.2, 0.4, -0.6},
                           {-0.8, 1.5, 0.95}, {0.2, 0.1, -0.97}}) {
    const int n = 2000000;
    double c = std::sqrt(1 - rho * rho);
    long long hits = 0;
    for (int i = 0; i < n; ++i) {
      double z1 = rng.gaussian();
      double z2 = rho * z1 + c * rng.gaussian();
      hits += (z1 <= h && z2 <= k);
    }
    double mc = static_cast<double>(hits) / n;
    double se = std::sqrt(mc * (1 - mc) / n);
    CHECK(std::abs(bivariate_normal_cdf(h, k, rho) - mc) < 4 * se + 1e-7);
  }
}

TEST_CASE("analytic autoregressive tables") {
  auto m = NullModel::ar1(0, 0.5, 1);
  auto t = null_tables(m, {0.25, 0.5, 0.75}, 6);
  CHECK(t.analytic);
  // lag-0 diagonal is u(1-u) exactly
  CHECK(t.C0.at(0, 1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  // arcsin identity: C_{0,1}(median, median) = arcsin(a)/(2pi) = 1/12
  CHECK(t.C0.at(1, 1, 1) == doctest::Approx(1.0 / 12).epsilon(1e-7));
  // decay toward independence
  CHECK(std::abs(t.C0.at(6, 1, 1)) < t.C0.at(1, 1, 1));
  // transpose symmetry of negative lags
  CHECK(t.C0.at(-3, 0, 2) == t.C0.at(3, 2, 0));
  // thresholds are the stationary quantiles
  double sd = 1.0 / std::sqrt(1 - 0.25);
  CHECK(t.grid.thresholds[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.grid.thresholds[2] == doctest::Approx(sd * normal_quantile(0.75)).epsilon(1e-10));
}

TEST_CASE("iid tables are independent beyond lag zero") {
  auto t = null_tables(NullModel::iid(0, 1), {0.2, 0.5, 0.8}, 4);
  CHECK(t.C0.at(0, 0, 2) == doctest::Approx(0.2 - 0.2 * 0.8).epsilon(1e-7));
  for (int r = 1; r <= 4; ++r)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(t.C0.at(r, i, j) == 0.0);
}

TEST_CASE("monte carlo tables agree with the analytic path") {
  auto m = NullModel::ar1(0, 0.5, 1);
  std::vector<double> levels = {0.1, 0.25, 0.5, 0.75, 0.9};
  auto exact = null_tables(m, levels, 5);
  McConfig mc;
  mc.N = 1000000;
  mc.seed = 17;
  mc.force_monte_carlo = true;
  auto sim = null_tables(m, levels, 5, mc);
  CHECK_FALSE(sim.analytic);
  CHECK(sim.mc_N == mc.N);
  for (int r = 0; r <= 5; ++r)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        CHECK(std::abs(sim.C0.at(r, i, j) - exact.C0.at(r, i, j)) < 5e-3);
}

TEST_CASE("arch sign symmetry kills the median autocovariance") {
  McConfig mc;
  mc.N = 1000000;
  mc.seed = 23;
  auto t = null_tables(NullModel::arch1(0, 1.0 / 1.9, 0.9), {0.25, 0.5, 0.75}, 3, mc);
  CHECK(std::abs(t.C0.at(1, 1, 1)) < 3e-3);
}

TEST_CASE("moment-matched autoregression for squared arch") {
  auto flat = matched_ar1_for_squared_arch(0.4, 0.0);
  CHECK(flat.mu == doctest::Approx(0.4));
  CHECK(flat.sigma_eps * flat.sigma_eps == doctest::Approx(0.32).epsilon(1e-12));

  auto m = matched_ar1_for_squared_arch(0.4, 0.5);
  CHECK(m.mu == doctest::Approx(0.4));
  CHECK(m.a == doctest::Approx(0.5));
  CHECK(m.sigma_eps * m.sigma_eps == doctest::Approx(3.84).epsilon(1e-12));
  CHECK_THROWS(matched_ar1_for_squared_arch(0.4, 0.58));

  // Simulation oracle: the squared ARCH and the matched AR(1) share mean,
  // variance, and lag-1 autocovariance. Checked at a = 0.3 where the eighth
  // moment of the underlying ARCH exists (105 a^4 < 1), so the sample
  // variance of the squares has finite Monte Carlo error.
  auto m3 = matched_ar1_for_squared_arch(0.4, 0.3);
  const double mean3 = 0.4 / 0.7;
  const double ex4 = 3 * (0.16 + 2 * 0.4 * 0.3 * mean3) / (1 - 0.27);
  const double var3 = ex4 - mean3 * mean3;
  CHECK(m3.sigma_eps * m3.sigma_eps == doctest::Approx((1 - 0.09) * var3).epsilon(1e-12));
  const int N = 2000000;
  auto y = simulate(NullModel::squared_arch1(0.4, 0.3), N, 5);
  CHECK(mean(y.values) == doctest::Approx(mean3).epsilon(0.01));
  CHECK(variance(y.values) == doctest::Approx(var3).epsilon(0.05));
  double mu = mean(y.values), acc = 0;
  for (int t = 0; t + 1 < N; ++t)
    acc += (y.values[t] - mu) * (y.values[t + 1] - mu);
  acc /= N - 1;
  CHECK(acc == doctest::Approx(0.3 * var3).epsilon(0.08));
  // the mean is first-moment only, so it holds at a = 0.5 as well
  auto y5 = simulate(NullModel::squared_arch1(0.4, 0.5), N, 6);
  CHECK(mean(y5.values) == doctest::Approx(0.8).epsilon(0.03));
}

TEST_CASE("table cache round trips through disk") {
  auto dir = std::filesystem::temp_directory_path() / "qspec-cache-test";
  std::filesystem::remove_all(dir);
  McConfig mc;
  mc.N = 50000;
  mc.seed = 9;
  mc.cache_dir = dir.string();
  auto model = NullModel::squared_arch1(0.4, 0.3);
  auto fresh = null_tables(model, {0.25, 0.5, 0.75}, 4, mc);
  CHECK_FALSE(std::filesystem::is_empty(dir));
  auto cached = null_tables(model, {0.25, 0.5, 0.75}, 4, mc);
  CHECK(cached.C0.data == fresh.C0.data);
  CHECK(cached.grid.thresholds == fresh.grid.thresholds);
  std::filesystem::remove_all(dir);
}

TEST_CASE("monte carlo size floor") {
  McConfig mc;
  mc.N = 5000;
  CHECK_THROWS(null_tables(NullModel::squared_arch1(0.4, 0.3), {0.5}, 2, mc));
}
