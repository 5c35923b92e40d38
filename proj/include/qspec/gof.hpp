#pragma once

#include <optional>
#include <utility>

#include "json.hpp"
#include "qspec/null_models.hpp"
#include "qspec/qsd.hpp"

namespace qspec {

struct TestReport {
  std::string test_name;
  double statistic = 0.0;
  double E_T = 0.0;
  double V_T = 0.0;
  double z = 0.0;
  double p_normal = 1.0;
  std::optional<double> p_bootstrap;
  int bootstrap_reps = 0;
  nlohmann::json settings;  // full effective configuration echo
};

struct GofOptions {
  bool plug_in_moments = false;  // moments from the data estimate, not tables
  int bootstrap_reps = 0;        // 0 = normal approximation only
  std::uint64_t seed = 0;
};

// Quadratic distance between the estimate and the tapered null spectrum,
//   Q_T = (2pi/T) sum_k sum_{i,j} |Ghat(x_i,x_j;w_k) - G~_0(x_i,x_j;w_k)|^2 w_i w_j
// with G~_0 = (1/2pi) sum_{|r|<=M} lambda_M(r) C_{0,r} e^{ir w_k}. Evaluated
// in the lag domain (exact Parseval identity) when 2M < T, otherwise summed
// over frequencies directly.
double q_statistic(const Series& series, const NullModelTables& tables,
                   const LagWindowSpec& window);

// Frequency-domain evaluation of the same quantity; standing cross-check of
// the lag route (equal to ~1e-8 relative when 2M < T).
double q_statistic_freq(const Series& series, const NullModelTables& tables,
                        const LagWindowSpec& window);

// Mean and variance of Q_T under the null, from spectra on the T Fourier
// frequencies (layout q x q x T) and score weights w:
//   E_T = (2pi/T) * [(1/T) sum_{|r|<=M} lambda^2] * sum_s S1(w_s)^2,
//         S1(s) = sum_i w_i G(x_i,x_i;w_s)
//   V_T = (4/T^2) (2pi/T)^2 * Re sum_{s,s'} Delta_M(w_s - w_s')^2 * S~(s,s')^2,
//         S~(s,s') = sum_{i,j} w_i w_j G(x_i,x_j;w_s) conj(G(x_i,x_j;w_s'))
std::pair<double, double> moments_from_spectra(
    const std::vector<std::complex<double>>& g, int q, int T,
    const std::vector<double>& weights, const LagWindowSpec& window);

// Moments from the (untapered) null spectra implied by the tables.
std::pair<double, double> null_moments(const NullModelTables& tables,
                                       const LagWindowSpec& window, int T);

// Exploratory plug-in variant: moments from the data's own estimate.
std::pair<double, double> plug_in_moments(const QsdEstimate& est);

TestReport gof_test(const Series& series, const NullModelTables& tables,
                    const LagWindowSpec& window, const GofOptions& options = {});

// (1/T) sum_k sum_{i,j} w_i w_j |G_alt - G_null|^2 between two tabled models
// on a common grid: the mean shift a fixed alternative induces in Q_T.
double deviation_measure(const NullModelTables& tables_null,
                         const NullModelTables& tables_alt,
                         const LagWindowSpec& window, int T);

}  // namespace qspec
