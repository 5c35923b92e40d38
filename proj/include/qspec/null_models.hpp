#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "qspec/indicator.hpp"
#include "qspec/lag_window.hpp"

namespace qspec {

// A conjectured null process. Parameters are inputs; fitting is out of scope.
struct NullModel {
  enum class Kind { IID, AR1, ARCH1, GARCH11, SquaredARCH1 };

  Kind kind = Kind::IID;
  double mu = 0.0;
  double a = 0.0;          // AR1 / SquaredARCH1 autoregressive coefficient
  double sigma_eps = 1.0;  // AR1 innovation sd; IID marginal sd
  double a0 = 0.0;         // (G)ARCH intercept
  double a1 = 0.0;         // (G)ARCH coefficient on e_{t-1}^2
  double b = 0.0;          // GARCH coefficient on sigma_{t-1}^2

  static NullModel iid(double mu, double sigma);
  static NullModel ar1(double mu, double a, double sigma_eps);
  static NullModel arch1(double mu, double a0, double a1);
  static NullModel garch11(double mu, double a0, double a1, double b);
  static NullModel squared_arch1(double a0, double a);  // Y_t = X_t^2, X ARCH(1)

  // Named fixtures: "msft-garch" (the fitted daily-return GARCH(1,1)) and
  // "intel-arch" (the fitted ARCH(1)).
  static NullModel preset(const std::string& name);

  static NullModel from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  // Stationarity / positivity constraints; throws std::invalid_argument.
  void validate() const;

  std::string kind_name() const;

  // True iff lagged quantile covariances admit a closed form here (IID and
  // AR1); everything else goes through Monte Carlo.
  bool analytic_tables() const {
    return kind == Kind::IID || kind == Kind::AR1;
  }
};

struct McConfig {
  long long N = 1000000;   // Monte Carlo path length (after burn-in)
  std::uint64_t seed = 1;
  std::string cache_dir;   // empty = no on-disk cache
  bool force_monte_carlo = false;  // bypass analytic tables (cross-checks)
};

// F_0 quantile thresholds and the lagged quantile covariances
// C_{0,r}(x_i, x_j) = P(X_0 <= x_i, X_r <= x_j) - F_0(x_i) F_0(x_j)
// of a null model, for |r| <= M. Input to the test moments and bootstrap.
struct NullModelTables {
  NullModel model;
  QuantileGrid grid;
  QuantileCovs C0;  // lags 0..M; negative lags via the transpose accessor
  bool analytic = false;
  long long mc_N = 0;
  std::uint64_t mc_seed = 0;

  int M() const { return C0.M; }

  // Symmetry/bounds/diagonal invariants; tol covers Monte Carlo noise.
  void validate(double tol = 1e-9) const;

  nlohmann::json to_json() const;
  static NullModelTables from_json(const nlohmann::json& j);
};

// Simulates T observations after a 1000-step burn-in; Gaussian innovations;
// bit-reproducible given (model, T, seed).
Series simulate(const NullModel& model, int T, std::uint64_t seed);

// P(N1 <= h, N2 <= k) for standard bivariate normal with correlation rho,
// absolute error below 1e-7 (Drezner-Wesolowsky / Genz quadrature).
double bivariate_normal_cdf(double h, double k, double rho);

// Builds the C_{0,r} tables at the model's own quantiles for the given
// levels. AR1 and IID are analytic (bivariate normal); other models use one
// long simulated path of mc.N points (empirical quantiles + bucket counts).
// Results are cached in mc.cache_dir when set.
NullModelTables null_tables(const NullModel& model, const std::vector<double>& levels,
                            int M, const McConfig& mc = {});

// AR(1) with the same mean, variance and autocovariance sequence as the
// squares of an ARCH(1) with intercept a0 and coefficient a (needs 3a^2 < 1).
NullModel matched_ar1_for_squared_arch(double a0, double a);

// Null spectra (1/2pi) sum_{|r|<=M} lambda(r/M) C_{0,r} e^{ir omega_k} on
// n_freq frequencies; pass a truncated window for the untapered version.
std::vector<std::complex<double>> null_qsd_on_grid(const NullModelTables& tables,
                                                   const LagWindowSpec& window,
                                                   int n_freq);

}  // namespace qspec
