#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tomolab/errors.hpp"
#include "tomolab/priors.hpp"
#include "tomolab/randq.hpp"
#include "tomolab/smc.hpp"
#include "tomolab/state_space.hpp"
#include "tomolab/tracking.hpp"

using namespace tomolab;

namespace {

CMatrix diag(std::initializer_list<double> v) {
  CMatrix m = CMatrix::Zero(v.size(), v.size());
  int k = 0;
  for (double x : v) m(k, k) = x, ++k;
  return m;
}

}  // namespace

TEST_SUITE("tracking") {

TEST_CASE("truncate to state") {
  CHECK(oracle::max_abs(truncate_to_state(diag({1.2, -0.2})).matrix() - diag({1, 0})) < 1e-15);
  CHECK(oracle::max_abs(truncate_to_state(diag({0.5, -0.1, 0.2})).matrix() - diag({5.0 / 7, 0, 2.0 / 7})) < 1e-15);
  CHECK_THROWS_AS(truncate_to_state(diag({-0.5, -0.1})), DegenerateProjection);
  std::mt19937_64 g(1);
  for (int t = 0; t < 100; ++t) {
    const CMatrix rho = oracle::random_state(3, g);
    CHECK(oracle::max_abs(truncate_to_state(rho).matrix() - rho) < 1e-12);
    const CMatrix h = oracle::random_hermitian(3, g) + CMatrix::Identity(3, 3);
    if (oracle::eigenvalues(h).maxCoeff() <= 0) continue;
    const CMatrix once = truncate_to_state(h).matrix();
    CHECK(oracle::max_abs(truncate_to_state(once).matrix() - once) < 1e-12);
    CHECK(oracle::eigenvalues(once).minCoeff() > -1e-12);
    CHECK(once.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("coin truncate") {
  CHECK(coin_truncate(1.05) == 1.0);
  CHECK(coin_truncate(-0.3) == 0.0);
  CHECK(coin_truncate(0.4) == 0.4);
}

TEST_CASE("state space projections are idempotent and fix members") {
  const auto b = pauli_basis(1);
  DensitySpace space(b);
  std::mt19937_64 g(2);
  std::normal_distribution<double> n;
  for (int t = 0; t < 200; ++t) {
    RVector x = vectorize(oracle::random_state(2, g), *b).coords;
    const RVector keep = x;
    space.project({x.data(), 4});
    CHECK((x - keep).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 1; k < 4; ++k) x(k) += 0.5 * n(g);
    space.project({x.data(), 4});
    CHECK(space.contains({x.data(), 4}));
    CHECK(x(0) == 1.0 / std::sqrt(2.0));
    RVector again = x;
    space.project({again.data(), 4});
    CHECK((again - x).cwiseAbs().maxCoeff() < 1e-12);
  }

  const auto cb = pauli_basis(2);
  ChoiSpace choi(cb, 2);
  RngStream rng(3);
  for (int t = 0; t < 200; ++t) {
    RVector x = vectorize(bcsz_channel(2, 2, rng).matrix(), *cb).coords;
    const RVector keep = x;
    choi.project({x.data(), 16});
    CHECK((x - keep).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 1; k < 16; ++k) x(k) += 0.05 * n(g);
    choi.project({x.data(), 16});
    REQUIRE(choi.contains({x.data(), 16}));
    const CMatrix j = cb->matrix(x);
    CHECK(oracle::max_abs(oracle::trace_out_second(j, 2, 2) - CMatrix::Identity(2, 2) / 2.0) < 1e-8);
    RVector again = x;
    choi.project({again.data(), 16});
    CHECK((again - x).cwiseAbs().maxCoeff() < 1e-10);
  }

  CoinSpace coin;
  double p = 1.3;
  coin.project({&p, 1});
  CHECK(p == 1.0);
}

TEST_CASE("diffusion with zero rate is the identity") {
  const auto b = pauli_basis(1);
  DensitySpace space(b);
  RngStream rng(4);
  auto c = init_cloud(ginibre_prior(b, 2), space, 200, rng);
  attach_etas(c, EtaPrior{0.0, 1.0}, rng);
  const RowMatrix before = c.locations;
  diffuse_cloud(c, space, DiffusionStep{1.0, {}}, rng);
  CHECK((c.locations - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("interior diffusion variance") {
  const auto b = pauli_basis(1);
  DensitySpace space(b);
  const RVector centre = vectorize(oracle::pauli('I') / 2.0, *b).coords;
  const int n = 10000;
  RowMatrix loc(n, 4);
  for (int i = 0; i < n; ++i) loc.row(i) = centre.transpose();
  auto c = cloud_from_locations(loc, b->name());
  const double eta = 0.01, dt = 2.5;
  c.etas = RVector::Constant(n, eta);
  RngStream rng(5);
  diffuse_cloud(c, space, DiffusionStep{dt, {}}, rng);
  for (int k = 1; k < 4; ++k) {
    const double m = c.locations.col(k).mean();
    const double v = (c.locations.col(k).array() - m).square().sum() / (n - 1);
    CHECK(v == doctest::Approx(dt * eta * eta).epsilon(0.05));
  }
  CHECK((c.locations.col(0).array() - centre(0)).abs().maxCoeff() == 0.0);
  CHECK((c.etas.array() - eta).abs().maxCoeff() == 0.0);
}

TEST_CASE("boundary particles stay valid") {
  const auto b = pauli_basis(1);
  DensitySpace space(b);
  const RVector pure = vectorize(0.5 * (oracle::pauli('I') + oracle::pauli('Z')), *b).coords;
  RowMatrix loc(1000, 4);
  for (int i = 0; i < 1000; ++i) loc.row(i) = pure.transpose();
  auto c = cloud_from_locations(loc, b->name());
  c.etas = RVector::Constant(1000, 0.2);
  RngStream rng(6);
  for (int step = 0; step < 5; ++step) {
    diffuse_cloud(c, space, DiffusionStep{1.0, {}}, rng);
    for (std::size_t i = 0; i < c.size(); ++i) {
      REQUIRE(space.contains(c.row(i)));
      REQUIRE(c.locations(i, 0) == pure(0));
    }
  }
  CHECK_THROWS_AS((DiffusionStep{0.0, {}}.validate()), InvalidArgument);
  CHECK_THROWS_AS((DiffusionStep{1.0, RVector::Constant(4, 0.1)}.validate()), InvalidArgument);
  CHECK_NOTHROW((DiffusionStep{1.0, RVector::Zero(4)}.validate()));
}

TEST_CASE("tracking bandwidth") {
  const auto a = tracking_bandwidth(0.05, 1.9599, 1.0);
  CHECK(a.n_samples == 385);
  CHECK(a.f_max == 1.0 / 770.0);
  const auto b = tracking_bandwidth(0.05, 2.0, 1.0);
  CHECK(b.n_samples == 400);
  CHECK(b.f_max == 1.0 / 800.0);
  double last = 0.0;
  for (double tol : {0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) {
    const double f = tracking_bandwidth(tol, 1.9599, 1.0).f_max;
    CHECK(f > last);
    last = f;
  }
  CHECK_THROWS_AS(tracking_bandwidth(0.6, 2.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(tracking_bandwidth(0.1, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(tracking_bandwidth(0.1, 2.0, -1.0), InvalidArgument);
}

TEST_CASE("eta prior") {
  RngStream rng(7);
  const EtaPrior p{0.006, 1.0};
  double m = 0.0;
  const int n = 200000;
  for (int t = 0; t < n; ++t) {
    const double e = p.sample(rng);
    REQUIRE(e > 0.0);
    m += e;
  }
  CHECK(m / n == doctest::Approx(0.006).epsilon(0.03));
  CHECK(EtaPrior{0.01, 0.0}.sample(rng) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(EtaPrior{0.0, 1.0}.sample(rng) == 0.0);
}

TEST_CASE("eta co-evolves through reweighting") {
  // Two eta populations on a coin. The source jumps from 0.2 to 0.8; only the
  // diffusing half can follow, so its share of the weight grows.
  CoinSpace space;
  Model model(std::make_shared<CoinSpace>());
  const int n = 2000;
  RowMatrix loc(n, 1);
  loc.setConstant(0.2);
  auto c = cloud_from_locations(loc, "coin");
  c.etas.resize(n);
  for (int i = 0; i < n; ++i) c.etas(i) = i % 2 ? 0.05 : 0.0;
  RngStream rng(8);
  RngStream data(9);
  const double w_fast_before = [&] {
    double s = 0;
    for (int i = 1; i < n; i += 2) s += c.weights(i);
    return s;
  }();
  for (int step = 0; step < 30; ++step) {
    diffuse_cloud(c, space, DiffusionStep{1.0, {}}, rng);
    const double p = step < 5 ? 0.2 : 0.8;
    const unsigned k = std::binomial_distribution<unsigned>(10, p)(data);
    bayes_update(c, Datum{k, coin_design(10)}, model);
  }
  double w_fast = 0.0;
  for (int i = 1; i < n; i += 2) w_fast += c.weights(i);
  CHECK(w_fast_before == doctest::Approx(0.5));
  CHECK(w_fast > 0.9);
  CHECK(eta_mean(c) > 0.045);
}

}  // TEST_SUITE
