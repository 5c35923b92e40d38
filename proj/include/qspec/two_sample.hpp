#pragma once

#include <cstdint>
#include <utility>

#include "qspec/gof.hpp"
#include "qspec/qsd.hpp"

namespace qspec {

struct TwoSampleOptions {
  int bootstrap_reps = 0;
  std::uint64_t seed = 0;
  double truncate_tolerance = 0.10;  // max relative length mismatch
};

// Quadratic distance between the two estimates over the shared grid,
//   P_T = (2pi/T) sum_k sum_{i,j} |Ghat_1 - Ghat_2|^2 w_i w_j,
// evaluated in the lag domain (exact for 2M < T).
double p_statistic(const Series& a, const Series& b, const QuantileGrid& grid,
                   const LagWindowSpec& window);

// Null mean/variance of P_T from the two plug-in estimates (must share grid,
// window and T):
//   E_T3 = (2pi/T)(1/T) sum lambda^2 * sum_s [S1_1(w_s)^2 + S1_2(w_s)^2]
//   V_T3 = (4/T^2)(2pi/T)^2 Re sum_{s,s'} Delta_M^2 (S~_1 + S~_2)(s,s')^2
// (the variance kernel of Chat_1 - Chat_2 is the sum of the two kernels).
std::pair<double, double> two_sample_moments(const QsdEstimate& g1,
                                             const QsdEstimate& g2);

// Full test on the pooled empirical quantile grid at the given levels;
// two-sided rejection is |z| > z_{1-alpha}, which report consumers apply.
TestReport two_sample_test(const Series& a, const Series& b,
                           const std::vector<double>& levels,
                           const LagWindowSpec& window,
                           const TwoSampleOptions& options = {});

// Time-reversibility statistic (1/T) sum_k sum_{i,j} w_i w_j Im(Ghat)^2;
// zero in the limit for processes with F_r = F_{-r}.
double r_statistic(const Series& series, const QuantileGrid& grid,
                   const LagWindowSpec& window);

// Bootstrap test of reversibility: the null spectra are the real part of the
// plug-in estimate (an artifact construction, flagged in the report), and
// each replicate rescores R* from re-drawn periodograms.
TestReport reversibility_test(const Series& series, const std::vector<double>& levels,
                              const LagWindowSpec& window, int reps,
                              std::uint64_t seed);

}  // namespace qspec
