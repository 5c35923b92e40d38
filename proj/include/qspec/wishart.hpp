#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qspec/null_models.hpp"
#include "qspec/rng.hpp"

namespace qspec {

// The null spectral matrices G_Z(omega_k), k = 0..T-1, together with their
// Hermitian PSD square roots. Negative eigenvalues from Monte Carlo table
// noise are clipped to zero at construction; the largest clip is recorded.
struct SpectralMatrixSet {
  int q = 0;
  int T = 0;
  std::vector<Eigen::MatrixXcd> matrices;
  std::vector<Eigen::MatrixXcd> sqrts;
  double max_clipped = 0.0;  // largest |negative eigenvalue| zeroed
};

// Hermitian PSD square root via unitary eigendecomposition. Input must be
// Hermitian within 1e-10 (symmetrized on entry); eigenvalues in [-1e-8, 0)
// are clipped to 0, anything lower is an error.
Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m);

// G_Z from tables: untapered (1/2pi) sum_{|r|<=M} C_{0,r} e^{ir omega_k}.
SpectralMatrixSet build_spectral_set(const NullModelTables& tables, int T);

// Same from explicit spectra (layout q x q x T); used by the reversibility
// bootstrap with a symmetrized plug-in estimate.
SpectralMatrixSet build_spectral_set(const std::vector<std::complex<double>>& values,
                                     int q, int T);

// One set of bootstrap periodogram matrices: rank-one complex Wishart draws
// I*(w_k) = G^{1/2} z z^H G^{1/2} at 0 < k < T/2, real Wishart at the
// self-conjugate frequencies k = 0 and k = T/2, conjugate mirror above T/2.
std::vector<Eigen::MatrixXcd> draw_bootstrap_periodograms(const SpectralMatrixSet& set,
                                                          std::uint64_t seed);

struct BootstrapResult {
  double p = 1.0;
  std::vector<double> samples;
};

// Bootstrap null distribution of Q_T: each replicate re-smooths one set of
// periodogram draws and rescores against the tapered null; add-one p-value
// p = (1 + #{Q* >= observed}) / (reps + 1). Replicate r uses RNG stream
// (seed, r), so results are independent of evaluation order.
//
// Each replicate is rescaled by the exact factor that maps the sampler's
// finite-sample mean onto the statistic's limiting mean E_T. The
// conjugate-mirrored draws couple every frequency with its conjugate, which
// inflates E[Q*] above E_T by an exactly computable O(1/T) term; without the
// correction the reference distribution is visibly right-shifted at small T.
BootstrapResult bootstrap_pvalue(double observed, const NullModelTables& tables,
                                 const LagWindowSpec& window, int T, int reps,
                                 std::uint64_t seed);

// Internal building block shared with the other bootstrap tests: the q x T
// matrix A with columns a_k = G(w_k)^{1/2} z_k, so I*(w_k) = a_k a_k^H.
// The sequence is conjugate-mirrored (A(T-k) = conj A(k)), as for a real
// series.
Eigen::MatrixXcd draw_bootstrap_amplitudes(const SpectralMatrixSet& set, Rng& rng);

// Bootstrap covariances Chat*_r = (2pi/T) A diag(e^{-ir w_s}) A^H for
// r = 0..M, flattened like QuantileCovs but complex.
std::vector<Eigen::MatrixXcd> bootstrap_covs(const Eigen::MatrixXcd& A, int M);

}  // namespace qspec
