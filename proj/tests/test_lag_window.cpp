#include <cmath>
#include <numeric>

#include "doctest.h"
#include "qspec/lag_window.hpp"

using namespace qspec;

TEST_CASE("bartlett taper values") {
  auto w = LagWindowSpec::bartlett(4);
  CHECK(lambda_at_lag(w, 0) == doctest::Approx(1.0));
  CHECK(lambda_at_lag(w, 1) == doctest::Approx(0.75));
  CHECK(lambda_at_lag(w, 3) == doctest::Approx(0.25));
  CHECK(lambda_at_lag(w, 4) == doctest::Approx(0.0));
  CHECK(lambda_at_lag(w, 5) == 0.0);
  CHECK(lambda_at_lag(w, -2) == lambda_at_lag(w, 2));
}

TEST_CASE("truncated taper is flat inside the bandwidth") {
  auto w = LagWindowSpec::truncated(3);
  for (int r = -3; r <= 3; ++r) CHECK(lambda_at_lag(w, r) == 1.0);
  CHECK(lambda_at_lag(w, 4) == 0.0);
}

TEST_CASE("general taper matches its closed form") {
  // lambda(u) = a0 + 2 a1 cos(2 pi u) + 2 a2 cos(4 pi u) - b1 |u| - b2 u^2
  auto w = LagWindowSpec::tukey(10, {0.6, 0.15, 0.05}, {0.2, 0.1});
  for (double u : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    double expect = 0.6 + 2 * 0.15 * std::cos(2 * M_PI * u) +
                    2 * 0.05 * std::cos(4 * M_PI * u) - 0.2 * u - 0.1 * u * u;
    CHECK(eval_lambda(w, u) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(eval_lambda(w, -u) == doctest::Approx(expect).epsilon(1e-14));
  }
  CHECK(eval_lambda(w, 1.0001) == 0.0);
}

TEST_CASE("spectral kernel for the truncated window equals the Dirichlet form") {
  auto w = LagWindowSpec::truncated(6);
  const int T = 64;
  for (double theta : {0.3, 1.1, 2.7}) {
    double dirichlet =
        std::sin((6 + 0.5) * theta) / std::sin(theta / 2.0) / T;
    CHECK(kernel_K(w, T, theta) == doctest::Approx(dirichlet).epsilon(1e-12));
  }
}

TEST_CASE("kernel grid sums to one over the Fourier frequencies") {
  // (1/T) sum_k sum_r lambda_r cos(r w_k) collapses to lambda_0 = 1.
  for (auto w : {LagWindowSpec::bartlett(9), LagWindowSpec::truncated(5)}) {
    const int T = 128;
    const auto& grid = kernel_K_grid(w, T);
    REQUIRE(grid.size() == static_cast<std::size_t>(T));
    double s = std::accumulate(grid.begin(), grid.end(), 0.0);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(grid[3] == doctest::Approx(kernel_K(w, T, 2.0 * M_PI * 3 / T)).epsilon(1e-12));
  }
}

TEST_CASE("squared-taper transform at zero is the sum of squared weights") {
  auto w = LagWindowSpec::bartlett(5);
  double expect = 0.0;
  for (int r = -5; r <= 5; ++r) expect += lambda_at_lag(w, r) * lambda_at_lag(w, r);
  CHECK(delta_M(w, 0.0) == doctest::Approx(expect).epsilon(1e-14));
  // at theta = pi the terms alternate in sign
  double alt = 0.0;
  for (int r = -5; r <= 5; ++r)
    alt += lambda_at_lag(w, r) * lambda_at_lag(w, r) * std::cos(r * M_PI);
  CHECK(delta_M(w, M_PI) == doctest::Approx(alt).epsilon(1e-13));
}
