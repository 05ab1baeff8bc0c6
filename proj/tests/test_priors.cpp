#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tomolab/errors.hpp"
#include "tomolab/priors.hpp"
#include "tomolab/qobj.hpp"

using namespace tomolab;

namespace {

CMatrix diag3(double a, double b, double c) {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return m;
}

CMatrix bloch(double x, double y, double z) {
  return 0.5 * (oracle::pauli('I') + x * oracle::pauli('X') + y * oracle::pauli('Y') + z * oracle::pauli('Z'));
}

}  // namespace

TEST_SUITE("priors") {

TEST_CASE("gad parameters for the qutrit mean") {
  const auto p = gad_params(diag3(0.9, 0.05, 0.05));
  CHECK(p.alpha == 1.0);
  CHECK(std::abs(p.beta - 3.0 / 17.0) < 1e-12);
  CHECK(oracle::max_abs(p.rho_star - diag3(1, 0, 0)) < 1e-12);
  CHECK(p.lambda_min == doctest::Approx(0.05).epsilon(1e-12));
  CHECK_FALSE(p.passthrough);
}

TEST_CASE("gad parameters for a rebit mean") {
  const auto p = gad_params(bloch(1.0 / 3.0, 0.0, 2.0 / 3.0));
  const double lmin = (1.0 - std::sqrt(5.0) / 3.0) / 2.0;
  CHECK(p.lambda_min == doctest::Approx(lmin).epsilon(1e-12));
  CHECK(p.lambda_min == doctest::Approx(0.12732).epsilon(1e-4));
  CHECK(p.beta == doctest::Approx(2 * lmin / (1 - 2 * lmin)).epsilon(1e-12));
  CHECK(p.beta == doctest::Approx(0.34164).epsilon(1e-4));
  const auto ev = oracle::eigenvalues(p.rho_star);
  CHECK(std::abs(ev.minCoeff()) < 1e-10);
  CHECK(p.rho_star.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("maximally mixed mean passes the fiducial prior through") {
  const auto p = gad_params(CMatrix::Identity(3, 3) / 3.0);
  CHECK(p.passthrough);
  const auto fid = ginibre_prior(gell_mann_basis(3), 3);
  const auto ins = insightful_prior(fid, CMatrix::Identity(3, 3) / 3.0);
  CHECK(ins.kind() == PriorKind::fiducial);
  RngStream a(1), b(1);
  CHECK((ins.sample(a) - fid.sample(b)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gad rejects near-pure means") {
  CHECK_THROWS_AS(gad_params(diag3(1.0, 0.0, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(gad_params(diag3(1.0 - 1e-7, 1e-7, 0.0)), InvalidArgument);
}

TEST_CASE("gad samples are convex combinations with rho star") {
  const auto basis = gell_mann_basis(3);
  const auto gad = make_gad_prior(ginibre_prior(basis, 3), diag3(0.9, 0.05, 0.05));
  // beta -> infinity would force eps = 0; check the eps = 0 edge of the sampler.
  RngStream rng(3);
  for (int t = 0; t < 2000; ++t) {
    const RVector x = gad_sample(gad, rng);
    const CMatrix m = basis->matrix(x);
    REQUIRE(oracle::eigenvalues(m).minCoeff() > -1e-10);
    REQUIRE(m.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  }
  RngStream u(4);
  for (int t = 0; t < 1000; ++t) {
    const double e = sample_beta_one(3.0 / 17.0, u);
    REQUIRE(e >= 0.0);
    REQUIRE(e <= 1.0);
  }
}

TEST_CASE("gad mean at 1e5 draws") {
  const auto basis = gell_mann_basis(3);
  const CMatrix mu = diag3(0.9, 0.05, 0.05);
  const auto prior = insightful_prior(ginibre_prior(basis, 3), mu);
  CHECK(prior.kind() == PriorKind::insightful);
  RngStream rng(5);
  RVector mean = RVector::Zero(9);
  const int n = 100000;
  for (int t = 0; t < n; ++t) mean += prior.sample(rng);
  mean /= n;
  CHECK(oracle::trace_norm_half(basis->matrix(mean), mu) < 0.01);
}

TEST_CASE("sample_beta_one mean") {
  RngStream rng(6);
  const double beta = 3.0 / 17.0;
  double m = 0.0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) m += sample_beta_one(beta, rng);
  // E[Beta(1, b)] = 1 / (1 + b)
  CHECK(m / n == doctest::Approx(1.0 / (1.0 + beta)).epsilon(0.005));
}

TEST_CASE("channel gad prior keeps trace preservation") {
  const auto basis = pauli_basis(2);
  std::vector<CMatrix> had = {std::sqrt(0.7) * oracle::pauli('I'), std::sqrt(0.3) * oracle::hadamard()};
  const CMatrix truth = choi_of_channel(had).matrix();
  const CMatrix mu = 0.9 * truth + 0.1 * CMatrix::Identity(4, 4) / 4.0;
  const auto gad = make_gad_prior(bcsz_prior(basis, 2, 4), mu);
  CHECK(gad.beta == doctest::Approx(4 * 0.025 / (1 - 4 * 0.025)).epsilon(1e-10));
  CHECK(trace_preservation_defect(gad.rho_star, 2) < 1e-10);
  RngStream rng(7);
  for (int t = 0; t < 1000; ++t) {
    const CMatrix j = basis->matrix(gad_sample(gad, rng));
    REQUIRE(oracle::max_abs(oracle::trace_out_second(j, 2, 2) - CMatrix::Identity(2, 2) / 2.0) < 1e-8);
    REQUIRE(oracle::eigenvalues(j).minCoeff() > -1e-10);
  }
}

TEST_CASE("coin gad closed forms") {
  const auto a = coin_gad_params(1.0 / 3.0);
  CHECK(std::abs(a.beta - 2.0) < 1e-12);
  CHECK(std::abs(a.p_star) < 1e-12);
  const auto b = coin_gad_params(15.0 / 16.0);
  CHECK(std::abs(b.beta - 1.0 / 7.0) < 1e-12);
  CHECK(std::abs(b.p_star - 1.0) < 1e-12);
  CHECK(coin_gad_params(0.5).passthrough);
  CHECK_THROWS_AS(coin_gad_params(0.0), InvalidArgument);
  CHECK_THROWS_AS(coin_gad_params(1.0), InvalidArgument);
}

TEST_CASE("coin gad sampling") {
  RngStream a(1), b(1);
  const auto pass = coin_gad_params(0.5);
  CHECK(coin_gad_sample(pass, a) == b.uniform());

  RngStream rng(8);
  const auto quarter = coin_gad_params(0.25);
  double m = 0.0;
  const int n = 1000000;
  for (int t = 0; t < n; ++t) m += coin_gad_sample(quarter, rng);
  CHECK(std::abs(m / n - 0.25) < 0.002);

  // p_mu = 1/16 piles mass near 0 but still covers the whole interval.
  const auto low = coin_gad_params(1.0 / 16.0);
  int bins[10] = {};
  for (int t = 0; t < 100000; ++t) {
    const double p = coin_gad_sample(low, rng);
    REQUIRE(p >= 0.0);
    REQUIRE(p <= 1.0);
    ++bins[std::min(9, static_cast<int>(p * 10))];
  }
  for (int k = 0; k < 10; ++k) CHECK(bins[k] > 0);
  CHECK(bins[0] > 5 * bins[5]);
  for (int k = 1; k < 10; ++k) CHECK(bins[k] <= bins[k - 1] + 400);
}

TEST_CASE("prior samples are valid states") {
  RngStream rng(9);
  const auto check_prior = [&](const PriorDistribution& p) {
    for (int t = 0; t < 10000; ++t) {
      const CMatrix m = p.basis()->matrix(p.sample(rng));
      REQUIRE(oracle::max_abs(m - m.adjoint()) < 1e-10);
      REQUIRE(std::abs(m.trace() - Complex(1.0)) < 1e-10);
      REQUIRE(oracle::eigenvalues(m).minCoeff() > -1e-10);
    }
  };
  check_prior(ginibre_prior(pauli_basis(1), 2));
  check_prior(bures_prior(gell_mann_basis(3)));
  check_prior(rebit_prior(pauli_basis(1)));
  check_prior(bcsz_prior(pauli_basis(2), 2, 2));
  CHECK_THROWS_AS(rebit_prior(gell_mann_basis(3)), DimensionMismatch);
  CHECK_THROWS_AS(bcsz_prior(gell_mann_basis(3), 2, 2), DimensionMismatch);
  CHECK_THROWS_AS(bcsz_prior(pauli_basis(2), 2, 5), InvalidArgument);
}

}  // TEST_SUITE
