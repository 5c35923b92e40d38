#include "qspec/qsd.hpp"

#include <cmath>
#include <stdexcept>

#include "qspec/fft.hpp"
#include "qspec/stats.hpp"

namespace qspec {

namespace {

// Evaluates (1/2pi) sum_{|r|<=M} lambda_M(r) c_r e^{i r 2 pi k / N} for
// k = 0..N-1 given the one-sided lag sequence (c_r, c_{-r}).
std::vector<std::complex<double>> lag_to_freq(const std::vector<double>& c_pos,
                                              const std::vector<double>& c_neg,
                                              const LagWindowSpec& window, int N) {
  std::vector<std::complex<double>> packed(static_cast<std::size_t>(N), {0.0, 0.0});
  const int M = window.M;
  for (int r = 0; r <= M; ++r) {
    double lam = lambda_at_lag(window, r);
    packed[static_cast<std::size_t>(r % N)] += lam * c_pos[r];
    if (r > 0) {
      packed[static_cast<std::size_t>(((N - r) % N + N) % N)] += lam * c_neg[r];
    }
  }
  // sum_r g_r e^{+i r omega_k} = N * ifft(g)[k]
  auto out = ifft(packed);
  const double scale = static_cast<double>(N) / (2.0 * M_PI);
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace

std::vector<std::complex<double>> qsd_on_grid(const QuantileCovs& covs,
                                              const LagWindowSpec& window, int n_freq) {
  if (n_freq < 1) throw std::invalid_argument("qsd_on_grid: n_freq must be >= 1");
  const int q = covs.q;
  const int M = window.M;
  std::vector<std::complex<double>> values(
      static_cast<std::size_t>(q) * q * n_freq);
  std::vector<double> c_pos(static_cast<std::size_t>(M + 1));
  std::vector<double> c_neg(static_cast<std::size_t>(M + 1));
  for (int i = 0; i < q; ++i) {
    for (int j = i; j < q; ++j) {
      for (int r = 0; r <= M; ++r) {
        c_pos[r] = covs.at(r, i, j);
        c_neg[r] = covs.at(-r, i, j);
      }
      auto row = lag_to_freq(c_pos, c_neg, window, n_freq);
      for (int k = 0; k < n_freq; ++k) {
        values[(static_cast<std::size_t>(i) * q + j) * n_freq + k] = row[k];
        if (j != i) {
          values[(static_cast<std::size_t>(j) * q + i) * n_freq + k] = std::conj(row[k]);
        }
      }
    }
  }
  return values;
}

QsdEstimate qsd_from_covs(const QuantileCovs& covs, const QuantileGrid& grid,
                          const LagWindowSpec& window) {
  if (window.M >= covs.T) throw std::invalid_argument("estimate_qsd: M must be < T");
  QsdEstimate est;
  est.q = covs.q;
  est.T = covs.T;
  est.window = window;
  est.grid = grid;
  est.values = qsd_on_grid(covs, window, covs.T);
  return est;
}

QsdEstimate estimate_qsd(const Series& series, const QuantileGrid& grid,
                         const LagWindowSpec& window) {
  series.validate_for_estimation();
  if (window.M >= series.length()) throw std::invalid_argument("estimate_qsd: M must be < T");
  auto panel = build_panel(series, grid);
  auto covs = quantile_cov_all(panel, window.M);
  return qsd_from_covs(covs, grid, window);
}

QsdEstimate estimate_copula_qsd(const Series& series, const std::vector<double>& levels,
                                const LagWindowSpec& window) {
  series.validate_for_estimation();
  if (window.M >= series.length()) throw std::invalid_argument("estimate_qsd: M must be < T");
  auto panel = rank_panel(series, levels);
  auto covs = quantile_cov_all(panel, window.M);
  QuantileGrid grid;
  grid.thresholds = levels;
  grid.levels = levels;  // the copula marginal is uniform on (0,1)
  grid.validate();
  return qsd_from_covs(covs, grid, window);
}

std::vector<std::complex<double>> smoothed_periodogram(const IndicatorPanel& panel,
                                                       const LagWindowSpec& window,
                                                       int n_freq) {
  const int T = panel.T;
  const int q = panel.q;
  const int N = n_freq;
  if (N < T + window.M) {
    throw std::invalid_argument("smoothed_periodogram: need n_freq >= T + M");
  }
  // J(x; w_s) on the N-point grid, w_s = 2 pi s / N, via zero-padded DFT
  // (sign convention e^{-it w}).
  std::vector<std::vector<std::complex<double>>> J(static_cast<std::size_t>(q));
  {
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(N), {0.0, 0.0});
    for (int i = 0; i < q; ++i) {
      std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
      for (int t = 0; t < T; ++t) buf[t] = panel.at(t, i);
      J[i] = fft(buf);
      const double scale = 1.0 / std::sqrt(2.0 * M_PI * T);
      for (auto& v : J[i]) v *= scale;
    }
  }
  // Kernel on the same grid: (1/N) sum lambda_M(r) e^{ir w}.
  std::vector<double> K(static_cast<std::size_t>(N));
  for (int d = 0; d < N; ++d) K[d] = kernel_K(window, N, 2.0 * M_PI * d / N);

  std::vector<std::complex<double>> values(static_cast<std::size_t>(q) * q * N);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      for (int k = 0; k < N; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (int s = 0; s < N; ++s) {
          int d = k - s;
          d %= N;
          if (d < 0) d += N;
          acc += K[d] * J[i][s] * std::conj(J[j][s]);
        }
        values[(static_cast<std::size_t>(i) * q + j) * N + k] = acc;
      }
    }
  }
  return values;
}

ConfidenceBand confidence_band(const QsdEstimate& est, int i, int j, int k, double alpha) {
  if (i < 0 || i >= est.q || j < 0 || j >= est.q || k < 0 || k >= est.T) {
    throw std::invalid_argument("confidence_band: index out of range");
  }
  double omega = est.omega(k);
  if (!(omega > 0.0 && omega < M_PI)) {
    throw std::invalid_argument("confidence_band: omega must lie in (0, pi)");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("confidence_band: alpha must lie in (0,1)");
  }
  const auto& K = kernel_K_grid(est.window, est.T);
  double v_re = 0.0, v_im = 0.0;
  for (int s = 0; s < est.T; ++s) {
    int d = k - s;
    d %= est.T;
    if (d < 0) d += est.T;
    double k2 = K[d] * K[d];
    double gxx = est.at(i, i, s).real();
    double gyy = est.at(j, j, s).real();
    std::complex<double> gxy = est.at(i, j, s);
    double re2 = gxy.real() * gxy.real();
    double im2 = gxy.imag() * gxy.imag();
    v_re += k2 * 0.5 * (gxx * gyy + re2 - im2);
    v_im += k2 * 0.5 * (gxx * gyy + im2 - re2);
  }
  // Plug-in variances can dip below zero from estimation noise; floor at 0.
  v_re = std::max(v_re, 0.0);
  v_im = std::max(v_im, 0.0);
  double z = normal_quantile(1.0 - alpha / 2.0);
  std::complex<double> g = est.at(i, j, k);
  ConfidenceBand band;
  band.re_lo = g.real() - z * std::sqrt(v_re);
  band.re_hi = g.real() + z * std::sqrt(v_re);
  band.im_lo = g.imag() - z * std::sqrt(v_im);
  band.im_hi = g.imag() + z * std::sqrt(v_im);
  return band;
}

}  // namespace qspec
