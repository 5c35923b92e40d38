#pragma once

#include <span>
#include <stdexcept>

namespace qspec {

// Raised when a computation produces a value that violates a numerical
// invariant (e.g. a non-positive test variance); the CLI maps this to its
// numerical-integrity exit code.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Standard normal CDF.
double normal_cdf(double z);

// Standard normal quantile (Wichura's AS 241 rational approximation,
// accurate to ~1e-15). Requires p in (0, 1).
double normal_quantile(double p);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // denominator n-1
double skewness(std::span<const double> xs);

}  // namespace qspec
