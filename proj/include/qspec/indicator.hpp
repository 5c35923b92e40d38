#pragma once

#include <string>
#include <vector>

namespace qspec {

struct Series {
  std::vector<double> values;
  std::string name;

  int length() const { return static_cast<int>(values.size()); }

  // Throws if any value is non-finite or the series is shorter than 8.
  void validate_for_estimation() const;
};

// Integration grid for the dF_0(x) dF_0(y) sums: strictly increasing
// thresholds x_1 < ... < x_q with CDF levels F_0(x_i). Pair sums run over
// i = 2..q with weights w_i = F_0(x_i) - F_0(x_{i-1}); score_weight(0) is 0.
struct QuantileGrid {
  std::vector<double> thresholds;
  std::vector<double> levels;

  int size() const { return static_cast<int>(thresholds.size()); }

  // w_i for the discretised integral; index 0 contributes nothing.
  double score_weight(int i) const {
    return i == 0 ? 0.0 : levels[static_cast<std::size_t>(i)] -
                              levels[static_cast<std::size_t>(i - 1)];
  }

  void validate() const;

  bool same_as(const QuantileGrid& other, double tol = 1e-12) const;
};

// Evenly spaced levels lo, lo+step, ..., hi (defaults 0.05..0.95 by 0.05).
std::vector<double> default_levels();

// Empirical quantiles of a sample at the given levels (right-continuous
// inverse of the empirical CDF).
QuantileGrid empirical_grid(const Series& series, const std::vector<double>& levels);

// Centered indicator processes: Z[t][i] = I(X_t <= x_i) - Fhat(x_i).
struct IndicatorPanel {
  int T = 0;
  int q = 0;
  std::vector<double> z;     // row-major T x q
  std::vector<double> fhat;  // empirical CDF at each threshold

  double at(int t, int i) const {
    return z[static_cast<std::size_t>(t) * static_cast<std::size_t>(q) +
             static_cast<std::size_t>(i)];
  }
};

// Fraction of observations <= x.
double empirical_cdf(const Series& series, double x);

IndicatorPanel build_panel(const Series& series, const QuantileGrid& grid);

// Panel of the rank series Fhat_T(X_t) thresholded at levels u_i in (0,1);
// invariant under strictly increasing transformations of the input.
IndicatorPanel rank_panel(const Series& series, const std::vector<double>& levels);

// Rank series r_t = Fhat_T(X_t) = (# X_s <= X_t) / T.
std::vector<double> rank_transform(const Series& series);

// Quantile covariances Chat_r(x_i, x_j) for r = -M..M over all grid pairs.
// Lag-sum normalization is 1/T; Chat_{-r}(x,y) = Chat_r(y,x).
struct QuantileCovs {
  int M = 0;
  int q = 0;
  int T = 0;
  std::vector<double> data;  // (M+1) x q x q, lags r = 0..M

  double at(int r, int i, int j) const {
    if (r < 0) return at(-r, j, i);
    return data[(static_cast<std::size_t>(r) * q + i) * q + j];
  }
  double& at_mut(int r, int i, int j) {
    return data[(static_cast<std::size_t>(r) * q + i) * q + j];
  }
};

// FFT-batched computation; matches the direct nested-loop sum to ~1e-10
// relative. Requires max_lag < T.
QuantileCovs quantile_cov_all(const IndicatorPanel& panel, int max_lag);

// O(T M q^2) reference used by tests and self-checks.
QuantileCovs quantile_cov_naive(const IndicatorPanel& panel, int max_lag);

}  // namespace qspec
