#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "qspec/indicator.hpp"
#include "qspec/lag_window.hpp"

namespace qspec {

// Smoothed quantile spectral density estimate Ghat(x_i, x_j; omega_k) over
// every grid pair and the Fourier frequencies omega_k = 2 pi k / T,
// k = 0..T-1 (omega_0 stands in for omega_T = 2 pi; the two are the same
// point on the frequency circle).
struct QsdEstimate {
  int q = 0;
  int T = 0;
  LagWindowSpec window;
  QuantileGrid grid;
  std::vector<std::complex<double>> values;  // q x q x T

  std::complex<double> at(int i, int j, int k) const {
    return values[(static_cast<std::size_t>(i) * q + j) * T + k];
  }
  std::complex<double>& at_mut(int i, int j, int k) {
    return values[(static_cast<std::size_t>(i) * q + j) * T + k];
  }

  double omega(int k) const { return 2.0 * M_PI * k / T; }
};

// Ghat(x,y;omega_k) = (1/2pi) sum_{|r|<=M} lambda_M(r) Chat_r(x,y) e^{ir omega_k},
// computed by FFT over the lag index. Requires window.M < T.
QsdEstimate estimate_qsd(const Series& series, const QuantileGrid& grid,
                         const LagWindowSpec& window);

// Same, from precomputed covariances (the panel/grid must match).
QsdEstimate qsd_from_covs(const QuantileCovs& covs, const QuantileGrid& grid,
                          const LagWindowSpec& window);

// Kernel-smoothed periodogram route: sum_s K_M(w_k - w_s) J(x;w_s) conj(J(y;w_s))
// with J(x;w) = (2 pi T)^{-1/2} sum_t Z_t(x) e^{-it w}, evaluated on a grid of
// n_freq >= T + M frequencies so the identity with the lag route is exact.
// Used as a standing self-check of estimate_qsd; returns values at the same
// q x q x n_freq layout with omega_k = 2 pi k / n_freq.
std::vector<std::complex<double>> smoothed_periodogram(const IndicatorPanel& panel,
                                                       const LagWindowSpec& window,
                                                       int n_freq);

// Lag-route estimate evaluated on an arbitrary frequency count (same formula
// as estimate_qsd but with omega_k = 2 pi k / n_freq).
std::vector<std::complex<double>> qsd_on_grid(const QuantileCovs& covs,
                                              const LagWindowSpec& window, int n_freq);

// Copula (rank-based) variant: estimate on the rank series thresholded at
// the given levels. Exactly invariant under strictly increasing transforms.
QsdEstimate estimate_copula_qsd(const Series& series, const std::vector<double>& levels,
                                const LagWindowSpec& window);

struct ConfidenceBand {
  double re_lo = 0, re_hi = 0;
  double im_lo = 0, im_hi = 0;
};

// Pointwise Gaussian band for Re/Im Ghat(x_i, x_j; omega_k) at confidence
// 1 - alpha, from the plug-in variance
//   V = sum_s K_M(w_k - w_s)^2 [A C; C B](w_s).
// Requires 0 < omega_k < pi.
ConfidenceBand confidence_band(const QsdEstimate& est, int i, int j, int k, double alpha);

}  // namespace qspec
