#pragma once

#include <string>
#include <vector>

namespace qspec {

// A lag window: taper weights lambda(r/M) applied to sample covariances
// before Fourier transforming. The Tukey form is
//   lambda(u) = a_0 + 2 * sum_{r=1..R} a_r cos(2 pi r u) - sum_{j=1..R} b_j |u|^j
// on [-1, 1], zero outside; coefficients are user supplied. Truncated and
// Bartlett are shipped presets.
struct LagWindowSpec {
  enum class Kind { Truncated, Bartlett, TukeyGeneral };

  Kind kind = Kind::Bartlett;
  int M = 1;  // bandwidth: lags |r| <= M are kept
  std::vector<double> tukey_a;  // a_0..a_R
  std::vector<double> tukey_b;  // b_1..b_R

  static LagWindowSpec truncated(int M);
  static LagWindowSpec bartlett(int M);
  static LagWindowSpec tukey(int M, std::vector<double> a, std::vector<double> b);

  std::string kind_name() const;
};

// lambda(u); exactly zero for |u| > 1.
double eval_lambda(const LagWindowSpec& spec, double u);

// lambda_M(r) = lambda(r/M).
double lambda_at_lag(const LagWindowSpec& spec, int r);

// K_M(theta) = (1/T) sum_{|r|<=M} lambda(r/M) cos(r theta).
double kernel_K(const LagWindowSpec& spec, int T, double theta);

// K_M evaluated at the Fourier frequencies omega_k = 2 pi k / T,
// k = 0..T-1. Results are memoized per (spec, T).
const std::vector<double>& kernel_K_grid(const LagWindowSpec& spec, int T);

// Delta_M(theta) = sum_{|r|<=M} lambda(r/M)^2 cos(r theta) (lag-sum form,
// without a 1/2pi factor; all variance formulas use this convention).
double delta_M(const LagWindowSpec& spec, double theta);

}  // namespace qspec
