#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "qspec/stats.hpp"
#include "qspec/wishart.hpp"

using namespace qspec;

TEST_CASE("hermitian square root") {
  Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(3, 3);
  CHECK((hermitian_sqrt(id) - id).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  auto rd = hermitian_sqrt(d);
  CHECK(rd(0, 0).real() == doctest::Approx(2.0));
  CHECK(rd(1, 1).real() == doctest::Approx(3.0));

  Rng rng(4);
  Eigen::MatrixXcd b(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) b(i, j) = rng.complex_gaussian();
  Eigen::MatrixXcd a = b * b.adjoint();
  auto r = hermitian_sqrt(a);
  CHECK((r * r - a).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-10);

  Eigen::MatrixXcd neg = -id;
  CHECK_THROWS_AS(hermitian_sqrt(neg), NumericalError);
  Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_sqrt(skew), NumericalError);
}

TEST_CASE("spectral set construction from tables") {
  auto tables = null_tables(NullModel::ar1(0, 0.6, 1), {0.25, 0.5, 0.75}, 8);
  const int T = 64;
  auto set = build_spectral_set(tables, T);
  REQUIRE(set.T == T);
  REQUIRE(set.q == 3);
  CHECK(set.max_clipped < 1e-12);  // analytic tables give genuinely PSD spectra
  for (int k = 0; k < T; ++k) {
    const auto& g = set.matrices[k];
    CHECK((g - g.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((set.sqrts[k] * set.sqrts[k] - g).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((set.matrices[(T - k) % T] - g.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
  }
  // frequency 0 matrix is real
  CHECK(set.matrices[0].imag().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rank-one wishart draws have the right mean and symmetry") {
  // Identity-spectrum set: the draws at non-self-conjugate frequencies are
  // plain z z^H, so their mean must approach I_q.
  const int q = 5, T = 8;
  std::vector<std::complex<double>> flat(static_cast<std::size_t>(q) * q * T, 0.0);
  for (int i = 0; i < q; ++i)
    for (int k = 0; k < T; ++k) flat[(static_cast<std::size_t>(i) * q + i) * T + k] = 1.0;
  auto set = build_spectral_set(flat, q, T);

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(q, q);
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    auto draws = draw_bootstrap_periodograms(set, 1000 + r);
    for (int k = 1; k < T / 2; ++k) acc += draws[k];
    for (int k = 0; k < T; ++k) {
      CHECK((draws[(T - k) % T] - draws[k].conjugate()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(draws[k]);
      CHECK(eig.eigenvalues().minCoeff() > -1e-10);
    }
  }
  acc /= static_cast<double>(reps * (T / 2 - 1));
  CHECK((acc - Eigen::MatrixXcd::Identity(q, q)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("bootstrap periodograms are unbiased for the null spectra") {
  auto tables = null_tables(NullModel::ar1(0, 0.5, 1), {0.25, 0.5, 0.75}, 6);
  const int T = 32;
  auto set = build_spectral_set(tables, T);
  const int k = 5, reps = 20000;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
  Rng rng(77);
  for (int r = 0; r < reps; ++r) {
    auto a = draw_bootstrap_amplitudes(set, rng);
    acc += a.col(k) * a.col(k).adjoint();
  }
  acc /= static_cast<double>(reps);
  // entry sd is of order |G|, so 3 MC standard errors ~ 3*|G|/sqrt(reps)
  double tol = 3.0 * set.matrices[k].cwiseAbs().maxCoeff() / std::sqrt(double(reps));
  CHECK((acc - set.matrices[k]).cwiseAbs().maxCoeff() < 3 * tol);
}

TEST_CASE("bootstrap covariances match the direct sum and are unbiased") {
  auto tables = null_tables(NullModel::ar1(0, 0.5, 1), {0.25, 0.5, 0.75}, 4);
  const int T = 48, M = 4;
  auto set = build_spectral_set(tables, T);
  Rng rng(5);
  auto A = draw_bootstrap_amplitudes(set, rng);
  auto covs = bootstrap_covs(A, M);
  for (int r = 0; r <= M; ++r) {
    Eigen::MatrixXcd direct = Eigen::MatrixXcd::Zero(3, 3);
    for (int s = 0; s < T; ++s) {
      double ang = -2.0 * M_PI * r * s / T;
      direct += (A.col(s) * A.col(s).adjoint()) *
                std::complex<double>(std::cos(ang), std::sin(ang));
    }
    direct *= 2.0 * M_PI / T;
    CHECK((covs[r] - direct).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(direct.imag().cwiseAbs().maxCoeff() < 1e-9);  // conjugate pairing
  }

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
  const int reps = 8000;
  for (int rep = 0; rep < reps; ++rep) {
    auto a = draw_bootstrap_amplitudes(set, rng);
    acc += bootstrap_covs(a, M)[2];
  }
  acc /= static_cast<double>(reps);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(acc(i, j) - tables.C0.at(2, i, j)) < 0.01);
}

TEST_CASE("bootstrap p-value contract") {
  auto tables = null_tables(NullModel::ar1(0, 0.5, 1), {0.25, 0.5, 0.75}, 6);
  auto window = LagWindowSpec::bartlett(6);
  auto a = bootstrap_pvalue(0.0, tables, window, 64, 200, 11);
  CHECK(a.p == doctest::Approx(1.0));
  auto b = bootstrap_pvalue(1e100, tables, window, 64, 200, 11);
  CHECK(b.p == doctest::Approx(1.0 / 201));
  CHECK(a.samples == b.samples);  // same seed, same replicate stream
  CHECK(skewness(a.samples) > 0.0);
  for (double s : a.samples) CHECK(s >= 0.0);
  CHECK_THROWS(bootstrap_pvalue(1.0, tables, window, 64, 50, 1));
}
