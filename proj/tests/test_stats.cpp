#include <cmath>
#include <vector>

#include "doctest.h"
#include "qspec/stats.hpp"

using namespace qspec;

TEST_CASE("normal quantile against tabulated values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-12));
  CHECK(normal_quantile(0.99) == doctest::Approx(2.3263478740408408).epsilon(1e-12));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-10));
}

TEST_CASE("quantile and cdf are inverses") {
  for (double p : {0.001, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 0.999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("normal quantile rejects p outside (0,1)") {
  CHECK_THROWS(normal_quantile(0.0));
  CHECK_THROWS(normal_quantile(1.0));
  CHECK_THROWS(normal_quantile(-0.2));
}

TEST_CASE("moments of a small fixture") {
  std::vector<double> xs = {1.0, 2.0, 3.0, 4.0, 10.0};
  CHECK(mean(xs) == doctest::Approx(4.0));
  // sum of squared deviations = 9+4+1+0+36 = 50, / 4
  CHECK(variance(xs) == doctest::Approx(12.5));
  CHECK(skewness(xs) > 0.0);  // long right tail
  std::vector<double> sym = {-2.0, -1.0, 0.0, 1.0, 2.0};
  CHECK(skewness(sym) == doctest::Approx(0.0).epsilon(1e-14));
}
