#include "qspec/wishart.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "qspec/qsd.hpp"
#include "qspec/stats.hpp"

namespace qspec {

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_sqrt: not square");
  double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw NumericalError("hermitian_sqrt: input not Hermitian");
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  Eigen::VectorXd ev = eig.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-8) throw NumericalError("hermitian_sqrt: input not PSD");
    ev[i] = ev[i] > 0 ? std::sqrt(ev[i]) : 0.0;
  }
  return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().adjoint();
}

SpectralMatrixSet build_spectral_set(const std::vector<std::complex<double>>& values,
                                     int q, int T) {
  if (values.size() != static_cast<std::size_t>(q) * q * T)
    throw std::invalid_argument("build_spectral_set: size mismatch");
  SpectralMatrixSet set;
  set.q = q;
  set.T = T;
  set.matrices.resize(static_cast<std::size_t>(T));
  set.sqrts.resize(static_cast<std::size_t>(T));
  for (int k = 0; k <= T / 2; ++k) {
    Eigen::MatrixXcd g(q, q);
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        g(i, j) = values[(static_cast<std::size_t>(i) * q + j) * T + k];
    g = 0.5 * (g + g.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
    Eigen::VectorXd ev = eig.eigenvalues();
    double scale = std::max(1e-12, ev.cwiseAbs().maxCoeff());
    Eigen::VectorXd rt = ev;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev[i] < 0) {
        if (ev[i] < -0.1 * scale)
          throw NumericalError("build_spectral_set: spectra far from PSD");
        set.max_clipped = std::max(set.max_clipped, -ev[i]);
        ev[i] = 0.0;
      }
      rt[i] = std::sqrt(ev[i]);
    }
    set.matrices[static_cast<std::size_t>(k)] =
        eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().adjoint();
    set.sqrts[static_cast<std::size_t>(k)] =
        eig.eigenvectors() * rt.asDiagonal() * eig.eigenvectors().adjoint();
    int km = (T - k) % T;
    if (km > T / 2) {  // conjugate-symmetric upper half
      set.matrices[static_cast<std::size_t>(km)] =
          set.matrices[static_cast<std::size_t>(k)].conjugate();
      set.sqrts[static_cast<std::size_t>(km)] =
          set.sqrts[static_cast<std::size_t>(k)].conjugate();
    }
  }
  return set;
}

SpectralMatrixSet build_spectral_set(const NullModelTables& tables, int T) {
  auto values =
      null_qsd_on_grid(tables, LagWindowSpec::truncated(tables.M()), T);
  return build_spectral_set(values, tables.grid.size(), T);
}

namespace {

bool self_conjugate(int k, int T) { return k == 0 || (T % 2 == 0 && k == T / 2); }

// Exact mean of the unscaled bootstrap statistic. Writing the replicate as a
// quadratic form in the drawn periodograms and taking expectations gives
//   E[Q*] = (2pi/T^2) [ sum_r lambda^2 * sum_s S1(w_s)^2
//                       + sum_s Delta_M(2 w_s) * Re sum_ij w_i w_j G_ij(w_s)^2 ]
// where S1(w) = sum_i w_i G_ii(w). The first term is E_T, the statistic's
// limiting mean. The second comes from the conjugate mirroring I*(T-s) =
// conj I*(s): the same draw enters the smoothed estimate at two frequencies,
// and the real-Wishart draws at the self-conjugate frequencies contribute the
// same expression with Delta_M(0). Q* replicates are scaled by E_T / E[Q*] so
// the reference distribution is centered where the data statistic's null
// distribution is.
double bootstrap_mean_scale(const SpectralMatrixSet& set,
                            const NullModelTables& tables,
                            const LagWindowSpec& window) {
  const int q = set.q, T = set.T;
  const auto& grid = tables.grid;
  double lam2 = 0.0;
  for (int r = -window.M; r <= window.M; ++r) {
    double l = lambda_at_lag(window, r);
    lam2 += l * l;
  }
  double base = 0.0, pairing = 0.0;
  for (int s = 0; s < T; ++s) {
    const Eigen::MatrixXcd& g = set.matrices[static_cast<std::size_t>(s)];
    double s1 = 0.0;
    std::complex<double> sg2 = 0.0;
    for (int i = 0; i < q; ++i) {
      double wi = grid.score_weight(i);
      if (wi == 0.0) continue;
      s1 += wi * g(i, i).real();
      for (int j = 0; j < q; ++j) {
        double wj = grid.score_weight(j);
        if (wj == 0.0) continue;
        sg2 += wi * wj * g(i, j) * g(i, j);
      }
    }
    base += lam2 * s1 * s1;
    pairing += delta_M(window, 2.0 * (2.0 * M_PI * s / T)) * sg2.real();
  }
  if (!(base > 0.0) || !(base + pairing > 0.0))
    throw NumericalError("bootstrap_mean_scale: degenerate null spectra");
  return base / (base + pairing);
}

}  // namespace

Eigen::MatrixXcd draw_bootstrap_amplitudes(const SpectralMatrixSet& set, Rng& rng) {
  const int q = set.q, T = set.T;
  Eigen::MatrixXcd A(q, T);
  Eigen::VectorXcd z(q);
  for (int k = 0; k <= T / 2; ++k) {
    if (self_conjugate(k, T)) {
      for (int i = 0; i < q; ++i) z(i) = rng.gaussian();
    } else {
      for (int i = 0; i < q; ++i) z(i) = rng.complex_gaussian();
    }
    A.col(k) = set.sqrts[static_cast<std::size_t>(k)] * z;
    int km = (T - k) % T;
    if (km > T / 2) A.col(km) = A.col(k).conjugate();
  }
  return A;
}

std::vector<Eigen::MatrixXcd> draw_bootstrap_periodograms(const SpectralMatrixSet& set,
                                                          std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd A = draw_bootstrap_amplitudes(set, rng);
  std::vector<Eigen::MatrixXcd> out(static_cast<std::size_t>(set.T));
  for (int k = 0; k < set.T; ++k)
    out[static_cast<std::size_t>(k)] = A.col(k) * A.col(k).adjoint();
  return out;
}

std::vector<Eigen::MatrixXcd> bootstrap_covs(const Eigen::MatrixXcd& A, int M) {
  const int q = static_cast<int>(A.rows());
  const int T = static_cast<int>(A.cols());
  std::vector<Eigen::MatrixXcd> covs;
  covs.reserve(static_cast<std::size_t>(M) + 1);
  Eigen::MatrixXcd scaled(q, T);
  for (int r = 0; r <= M; ++r) {
    for (int s = 0; s < T; ++s) {
      double ang = -2.0 * M_PI * r * s / T;
      scaled.col(s) = A.col(s) * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    covs.push_back((2.0 * M_PI / T) * (scaled * A.adjoint()));
  }
  return covs;
}

BootstrapResult bootstrap_pvalue(double observed, const NullModelTables& tables,
                                 const LagWindowSpec& window, int T, int reps,
                                 std::uint64_t seed) {
  if (reps < 100) throw std::invalid_argument("bootstrap_pvalue: reps must be >= 100");
  const int M = window.M;
  if (2 * M >= T)
    throw std::invalid_argument("bootstrap_pvalue: need 2M < T");
  auto set = build_spectral_set(tables, T);
  const auto& grid = tables.grid;
  const int q = grid.size();

  std::vector<double> lam2(static_cast<std::size_t>(M) + 1);
  for (int r = 0; r <= M; ++r) {
    double l = lambda_at_lag(window, r);
    lam2[static_cast<std::size_t>(r)] = l * l;
  }

  const double scale = bootstrap_mean_scale(set, tables, window);

  BootstrapResult result;
  result.samples.resize(static_cast<std::size_t>(reps));
  int exceed = 0;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(rep));
    Eigen::MatrixXcd A = draw_bootstrap_amplitudes(set, rng);
    auto covs = bootstrap_covs(A, M);
    double qstar = 0.0;
    for (int r = 0; r <= M; ++r) {
      double s = 0.0;
      const auto& c = covs[static_cast<std::size_t>(r)];
      for (int i = 0; i < q; ++i) {
        double wi = grid.score_weight(i);
        if (wi == 0.0) continue;
        for (int j = 0; j < q; ++j) {
          double wj = grid.score_weight(j);
          if (wj == 0.0) continue;
          s += wi * wj * std::norm(c(i, j) - tables.C0.at(r, i, j));
        }
      }
      qstar += (r == 0 ? 1.0 : 2.0) * lam2[static_cast<std::size_t>(r)] * s;
    }
    qstar *= scale / (2.0 * M_PI);
    result.samples[static_cast<std::size_t>(rep)] = qstar;
    if (qstar >= observed) ++exceed;
  }
  result.p = static_cast<double>(1 + exceed) / (reps + 1);
  return result;
}

}  // namespace qspec
