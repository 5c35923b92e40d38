#include "qspec/gof.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "qspec/stats.hpp"
#include "qspec/wishart.hpp"

namespace qspec {

namespace {

double weighted_sq_gap(const QuantileCovs& chat, const QuantileCovs& c0,
                       const QuantileGrid& grid, int r) {
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    double wi = grid.score_weight(i);
    if (wi == 0.0) continue;
    for (int j = 0; j < grid.size(); ++j) {
      double wj = grid.score_weight(j);
      if (wj == 0.0) continue;
      double d = chat.at(r, i, j) - c0.at(r, i, j);
      s += wi * wj * d * d;
    }
  }
  return s;
}

void check_compatible(const NullModelTables& tables, const LagWindowSpec& window) {
  if (window.M > tables.M())
    throw std::invalid_argument("q_statistic: window M exceeds tabled lags");
}

}  // namespace

double q_statistic(const Series& series, const NullModelTables& tables,
                   const LagWindowSpec& window) {
  check_compatible(tables, window);
  const int T = series.length();
  if (2 * window.M >= T) return q_statistic_freq(series, tables, window);
  auto panel = build_panel(series, tables.grid);
  auto chat = quantile_cov_all(panel, window.M);
  double q = 0.0;
  for (int r = 0; r <= window.M; ++r) {
    double lam = lambda_at_lag(window, r);
    q += (r == 0 ? 1.0 : 2.0) * lam * lam * weighted_sq_gap(chat, tables.C0, tables.grid, r);
  }
  return q / (2.0 * M_PI);
}

double q_statistic_freq(const Series& series, const NullModelTables& tables,
                        const LagWindowSpec& window) {
  check_compatible(tables, window);
  const int T = series.length();
  auto est = estimate_qsd(series, tables.grid, window);
  auto g0 = null_qsd_on_grid(tables, window, T);  // tapered null
  const int q = tables.grid.size();
  double acc = 0.0;
  for (int i = 0; i < q; ++i) {
    double wi = tables.grid.score_weight(i);
    if (wi == 0.0) continue;
    for (int j = 0; j < q; ++j) {
      double wj = tables.grid.score_weight(j);
      if (wj == 0.0) continue;
      for (int k = 0; k < T; ++k) {
        acc += wi * wj *
               std::norm(est.at(i, j, k) -
                         g0[(static_cast<std::size_t>(i) * q + j) * T + k]);
      }
    }
  }
  return acc * 2.0 * M_PI / T;
}

std::pair<double, double> moments_from_spectra(
    const std::vector<std::complex<double>>& g, int q, int T,
    const std::vector<double>& weights, const LagWindowSpec& window) {
  if (g.size() != static_cast<std::size_t>(q) * q * T)
    throw std::invalid_argument("moments_from_spectra: size mismatch");
  auto at = [&](int i, int j, int k) {
    return g[(static_cast<std::size_t>(i) * q + j) * T + k];
  };

  double sum_lam2 = 0.0, e_t;
  for (int r = -window.M; r <= window.M; ++r) {
    double l = lambda_at_lag(window, r);
    sum_lam2 += l * l;
  }
  {
    double s = 0.0;
    for (int k = 0; k < T; ++k) {
      double s1 = 0.0;
      for (int i = 0; i < q; ++i) s1 += weights[static_cast<std::size_t>(i)] * at(i, i, k).real();
      s += s1 * s1;
    }
    e_t = (2.0 * M_PI / T) * (sum_lam2 / T) * s;
  }

  // V_T: stack the weighted spectra into U (T x q^2) so the pair contraction
  // S~(s,s') is a single Gram matrix U U^H.
  int p = 0;
  std::vector<int> ii, jj;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      if (weights[static_cast<std::size_t>(i)] != 0.0 &&
          weights[static_cast<std::size_t>(j)] != 0.0) {
        ii.push_back(i);
        jj.push_back(j);
        ++p;
      }
  Eigen::MatrixXcd U(T, p);
  for (int c = 0; c < p; ++c) {
    double w = std::sqrt(weights[static_cast<std::size_t>(ii[static_cast<std::size_t>(c)])] *
                         weights[static_cast<std::size_t>(jj[static_cast<std::size_t>(c)])]);
    for (int k = 0; k < T; ++k)
      U(k, c) = w * at(ii[static_cast<std::size_t>(c)], jj[static_cast<std::size_t>(c)], k);
  }
  Eigen::MatrixXcd S = U * U.adjoint();
  std::vector<double> dsq(static_cast<std::size_t>(T));
  for (int d = 0; d < T; ++d) {
    double v = delta_M(window, 2.0 * M_PI * d / T);
    dsq[static_cast<std::size_t>(d)] = v * v;
  }
  double acc = 0.0;
  for (int s = 0; s < T; ++s) {
    for (int s2 = 0; s2 < T; ++s2) {
      int d = s - s2;
      if (d < 0) d += T;
      acc += dsq[static_cast<std::size_t>(d)] * std::norm(S(s, s2));
    }
  }
  // This is the variance of the limiting Gaussian field, including the
  // coupling between each frequency and its conjugate (the estimate from a
  // real-valued series has that symmetry). Indicator processes carry negative
  // fourth-order cumulants the Gaussian limit ignores, so finite-sample Monte
  // Carlo variances of the statistic sit somewhat below this value.
  double c = 2.0 * M_PI / T;
  double v_t = (4.0 / (static_cast<double>(T) * T)) * c * c * acc;
  if (!(e_t > 0.0) || !(v_t > 0.0))
    throw NumericalError("null moments must be positive; convention bug");
  return {e_t, v_t};
}

std::pair<double, double> null_moments(const NullModelTables& tables,
                                       const LagWindowSpec& window, int T) {
  check_compatible(tables, window);
  auto g = null_qsd_on_grid(tables, LagWindowSpec::truncated(tables.M()), T);
  std::vector<double> w(static_cast<std::size_t>(tables.grid.size()));
  for (int i = 0; i < tables.grid.size(); ++i)
    w[static_cast<std::size_t>(i)] = tables.grid.score_weight(i);
  return moments_from_spectra(g, tables.grid.size(), T, w, window);
}

std::pair<double, double> plug_in_moments(const QsdEstimate& est) {
  std::vector<double> w(static_cast<std::size_t>(est.q));
  for (int i = 0; i < est.q; ++i) w[static_cast<std::size_t>(i)] = est.grid.score_weight(i);
  return moments_from_spectra(est.values, est.q, est.T, w, est.window);
}

TestReport gof_test(const Series& series, const NullModelTables& tables,
                    const LagWindowSpec& window, const GofOptions& options) {
  series.validate_for_estimation();
  const int T = series.length();
  TestReport report;
  report.test_name = "goodness_of_fit";
  report.statistic = q_statistic(series, tables, window);
  if (options.plug_in_moments) {
    auto est = estimate_qsd(series, tables.grid, window);
    std::tie(report.E_T, report.V_T) = plug_in_moments(est);
  } else {
    std::tie(report.E_T, report.V_T) = null_moments(tables, window, T);
  }
  report.z = (report.statistic - report.E_T) / std::sqrt(report.V_T);
  report.p_normal = 1.0 - normal_cdf(report.z);
  if (options.bootstrap_reps > 0) {
    auto boot = bootstrap_pvalue(report.statistic, tables, window, T,
                                 options.bootstrap_reps, options.seed);
    report.p_bootstrap = boot.p;
    report.bootstrap_reps = options.bootstrap_reps;
  }
  return report;
}

double deviation_measure(const NullModelTables& tables_null,
                         const NullModelTables& tables_alt,
                         const LagWindowSpec& window, int T) {
  // Each model carries its own quantile thresholds; comparability only needs
  // matching levels (the common integrating measure) and lag range.
  if (tables_null.grid.size() != tables_alt.grid.size() ||
      tables_null.M() != tables_alt.M())
    throw std::invalid_argument("deviation_measure: tables disagree on grid or M");
  for (int i = 0; i < tables_null.grid.size(); ++i)
    if (std::abs(tables_null.grid.levels[static_cast<std::size_t>(i)] -
                 tables_alt.grid.levels[static_cast<std::size_t>(i)]) > 1e-12)
      throw std::invalid_argument("deviation_measure: level sets differ");
  auto g0 = null_qsd_on_grid(tables_null, window, T);
  auto g1 = null_qsd_on_grid(tables_alt, window, T);
  const auto& grid = tables_null.grid;
  const int q = grid.size();
  double acc = 0.0;
  for (int i = 0; i < q; ++i) {
    double wi = grid.score_weight(i);
    if (wi == 0.0) continue;
    for (int j = 0; j < q; ++j) {
      double wj = grid.score_weight(j);
      if (wj == 0.0) continue;
      for (int k = 0; k < T; ++k) {
        std::size_t idx = (static_cast<std::size_t>(i) * q + j) * T + k;
        acc += wi * wj * std::norm(g1[idx] - g0[idx]);
      }
    }
  }
  return acc / T;
}

}  // namespace qspec
