#include "qspec/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qspec/fft.hpp"

namespace qspec {

void Series::validate_for_estimation() const {
  if (values.size() < 8) {
    throw std::invalid_argument("series '" + name + "': need at least 8 observations");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("series '" + name + "': non-finite value");
    }
  }
}

void QuantileGrid::validate() const {
  if (thresholds.empty()) throw std::invalid_argument("quantile grid: empty");
  if (thresholds.size() != levels.size()) {
    throw std::invalid_argument("quantile grid: thresholds/levels size mismatch");
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!std::isfinite(thresholds[i])) {
      throw std::invalid_argument("quantile grid: non-finite threshold");
    }
    if (levels[i] <= 0.0 || levels[i] >= 1.0) {
      throw std::invalid_argument("quantile grid: levels must lie in (0,1)");
    }
    if (i > 0 && !(thresholds[i] > thresholds[i - 1] && levels[i] > levels[i - 1])) {
      throw std::invalid_argument("quantile grid: thresholds/levels must be strictly increasing");
    }
  }
}

bool QuantileGrid::same_as(const QuantileGrid& other, double tol) const {
  if (size() != other.size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (std::fabs(thresholds[i] - other.thresholds[i]) > tol) return false;
    if (std::fabs(levels[i] - other.levels[i]) > tol) return false;
  }
  return true;
}

std::vector<double> default_levels() {
  std::vector<double> ls;
  for (int i = 1; i <= 19; ++i) ls.push_back(0.05 * i);
  return ls;
}

QuantileGrid empirical_grid(const Series& series, const std::vector<double>& levels) {
  std::vector<double> sorted = series.values;
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  QuantileGrid grid;
  for (double u : levels) {
    if (u <= 0.0 || u >= 1.0) throw std::invalid_argument("levels must lie in (0,1)");
    auto idx = static_cast<std::size_t>(std::ceil(u * static_cast<double>(n))) - 1;
    idx = std::min(idx, n - 1);
    grid.thresholds.push_back(sorted[idx]);
    grid.levels.push_back(u);
  }
  // Duplicate thresholds can arise from ties; nudge the grid apart only in
  // the degenerate case so validate() still holds.
  for (std::size_t i = 1; i < grid.thresholds.size(); ++i) {
    if (!(grid.thresholds[i] > grid.thresholds[i - 1])) {
      throw std::invalid_argument(
          "empirical grid: tied quantiles at requested levels; use fewer levels");
    }
  }
  grid.validate();
  return grid;
}

double empirical_cdf(const Series& series, double x) {
  std::size_t count = 0;
  for (double v : series.values) {
    if (v <= x) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(series.values.size());
}

IndicatorPanel build_panel(const Series& series, const QuantileGrid& grid) {
  grid.validate();
  const int T = series.length();
  const int q = grid.size();
  if (T == 0) throw std::invalid_argument("build_panel: empty series");

  IndicatorPanel panel;
  panel.T = T;
  panel.q = q;
  panel.fhat.resize(static_cast<std::size_t>(q));
  panel.z.resize(static_cast<std::size_t>(T) * q);

  std::vector<std::size_t> counts(static_cast<std::size_t>(q), 0);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < q; ++i) {
      if (series.values[t] <= grid.thresholds[i]) ++counts[i];
    }
  }
  for (int i = 0; i < q; ++i) {
    panel.fhat[i] = static_cast<double>(counts[i]) / static_cast<double>(T);
  }
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < q; ++i) {
      double ind = series.values[t] <= grid.thresholds[i] ? 1.0 : 0.0;
      panel.z[static_cast<std::size_t>(t) * q + i] = ind - panel.fhat[i];
    }
  }
  return panel;
}

std::vector<double> rank_transform(const Series& series) {
  const int T = series.length();
  std::vector<int> order(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return series.values[a] < series.values[b];
  });
  // rank_<=(X_t)/T with ties resolved by the right-continuous empirical CDF.
  std::vector<double> ranks(static_cast<std::size_t>(T));
  int i = 0;
  while (i < T) {
    int j = i;
    while (j + 1 < T && series.values[order[j + 1]] == series.values[order[i]]) ++j;
    double r = static_cast<double>(j + 1) / static_cast<double>(T);
    for (int k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

IndicatorPanel rank_panel(const Series& series, const std::vector<double>& levels) {
  if (levels.empty()) throw std::invalid_argument("rank_panel: empty levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] <= 0.0 || levels[i] >= 1.0) {
      throw std::invalid_argument("rank_panel: levels must lie in (0,1)");
    }
    if (i > 0 && !(levels[i] > levels[i - 1])) {
      throw std::invalid_argument("rank_panel: levels must be strictly increasing");
    }
  }
  Series rank_series{rank_transform(series), series.name + ":ranks"};
  QuantileGrid grid;
  grid.thresholds = levels;
  for (double u : levels) {
    // The empirical CDF of the rank series at u is floor(uT)/T; clamp away
    // from {0,1} so the grid stays valid for tiny T.
    double f = empirical_cdf(rank_series, u);
    grid.levels.push_back(f);
  }
  const int T = series.length();
  const int q = static_cast<int>(levels.size());
  IndicatorPanel panel;
  panel.T = T;
  panel.q = q;
  panel.fhat.resize(static_cast<std::size_t>(q));
  panel.z.resize(static_cast<std::size_t>(T) * q);
  for (int i = 0; i < q; ++i) panel.fhat[i] = grid.levels[i];
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < q; ++i) {
      double ind = rank_series.values[t] <= levels[i] ? 1.0 : 0.0;
      panel.z[static_cast<std::size_t>(t) * q + i] = ind - panel.fhat[i];
    }
  }
  return panel;
}

QuantileCovs quantile_cov_naive(const IndicatorPanel& panel, int max_lag) {
  if (max_lag >= panel.T) throw std::invalid_argument("quantile_cov: max_lag must be < T");
  if (max_lag < 0) throw std::invalid_argument("quantile_cov: max_lag must be >= 0");
  QuantileCovs covs;
  covs.M = max_lag;
  covs.q = panel.q;
  covs.T = panel.T;
  covs.data.assign(static_cast<std::size_t>(max_lag + 1) * panel.q * panel.q, 0.0);
  for (int r = 0; r <= max_lag; ++r) {
    for (int i = 0; i < panel.q; ++i) {
      for (int j = 0; j < panel.q; ++j) {
        double s = 0.0;
        for (int t = 0; t + r < panel.T; ++t) {
          s += panel.at(t, i) * panel.at(t + r, j);
        }
        covs.at_mut(r, i, j) = s / static_cast<double>(panel.T);
      }
    }
  }
  return covs;
}

QuantileCovs quantile_cov_all(const IndicatorPanel& panel, int max_lag) {
  if (max_lag >= panel.T) throw std::invalid_argument("quantile_cov: max_lag must be < T");
  if (max_lag < 0) throw std::invalid_argument("quantile_cov: max_lag must be >= 0");
  const int T = panel.T;
  const int q = panel.q;
  const std::size_t N = next_fast_size(static_cast<std::size_t>(2 * T));

  // Forward transforms of the zero-padded panel columns.
  std::vector<std::vector<std::complex<double>>> col_fft(static_cast<std::size_t>(q));
  {
    std::vector<std::complex<double>> buf(N);
    for (int i = 0; i < q; ++i) {
      std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
      for (int t = 0; t < T; ++t) buf[t] = panel.at(t, i);
      col_fft[i] = fft(buf);
    }
  }

  QuantileCovs covs;
  covs.M = max_lag;
  covs.q = q;
  covs.T = T;
  covs.data.assign(static_cast<std::size_t>(max_lag + 1) * q * q, 0.0);

  std::vector<std::complex<double>> prod(N);
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) {
      for (std::size_t n = 0; n < N; ++n) {
        prod[n] = std::conj(col_fft[i][n]) * col_fft[j][n];
      }
      auto corr = ifft(prod);
      // corr[r] = sum_t Z_t(i) Z_{t+r}(j) for r >= 0 (zero padding kills wrap).
      for (int r = 0; r <= max_lag; ++r) {
        covs.at_mut(r, i, j) = corr[r].real() / static_cast<double>(T);
      }
    }
  }

  // The r = 0 diagonal satisfies Chat_0(x,x) = Fhat(x)(1 - Fhat(x)) exactly;
  // write it through the closed form so the identity holds at bit level.
  for (int i = 0; i < q; ++i) {
    covs.at_mut(0, i, i) = panel.fhat[i] * (1.0 - panel.fhat[i]);
  }
  return covs;
}

}  // namespace qspec
