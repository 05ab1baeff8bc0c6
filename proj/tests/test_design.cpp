#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "tomolab/design.hpp"
#include "tomolab/errors.hpp"
#include "tomolab/priors.hpp"
#include "tomolab/randq.hpp"
#include "tomolab/smc.hpp"

using namespace tomolab;

namespace {

void check_projector(const CMatrix& e, int rank) {
  CHECK(oracle::max_abs(e * e - e) < 1e-12);
  CHECK(e.trace().real() == doctest::Approx(static_cast<double>(rank)).epsilon(1e-12));
}

}  // namespace

TEST_SUITE("design") {

TEST_CASE("random pauli designs") {
  const auto b1 = pauli_basis(1);
  RngStream rng(1);
  std::map<std::string, int> freq;
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const auto d = random_pauli_design(*b1, 10, rng);
    CHECK(d.n_meas == 10);
    const CMatrix e = b1->matrix(d.effect.coords);
    check_projector(e, 1);
    CHECK(oracle::max_abs(e - CMatrix::Identity(2, 2)) > 0.5);
    ++freq[d.label];
  }
  REQUIRE(freq.size() == 3);
  for (const auto& [label, count] : freq) CHECK(std::abs(count / static_cast<double>(n) - 1.0 / 3.0) < 0.02);

  const auto b2 = pauli_basis(2);
  for (int t = 0; t < 200; ++t) check_projector(b2->matrix(random_pauli_design(*b2, 1, rng).effect.coords), 2);
  CHECK_THROWS_AS(random_pauli_design(*gell_mann_basis(3), 1, rng), InvalidArgument);
}

TEST_CASE("qutrit stabilizer states form four mutually unbiased bases") {
  const auto& s = qutrit_stabilizer_states();
  REQUIRE(s.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t j = 0; j < 12; ++j) {
      const double ov = std::norm(s[i].dot(s[j]));
      if (i == j) CHECK(ov == doctest::Approx(1.0).epsilon(1e-12));
      else if (i / 3 == j / 3) CHECK(ov < 1e-12);
      else CHECK(std::abs(ov - 1.0 / 3.0) < 1e-10);
    }
  }
  const auto b = gell_mann_basis(3);
  RngStream rng(2);
  for (int t = 0; t < 300; ++t) check_projector(b->matrix(random_stabilizer_qutrit_design(*b, 20, rng).effect.coords), 1);
}

TEST_CASE("qpt designs") {
  const auto cb = pauli_basis(2);
  CHECK(qubit_pauli_eigenstates().size() == 6);
  CHECK(qubit_pauli_eigenstate_labels().size() == 6);
  RngStream rng(3);
  for (std::size_t p = 0; p < 6; ++p) {
    for (std::size_t m = 0; m < 6; ++m) {
      const auto d = qpt_design(*cb, p, m, 3);
      const CMatrix pe = cb->matrix(d.effect.coords);
      const auto ev = oracle::eigenvalues(pe);
      CHECK(ev.minCoeff() > -1e-12);
      CHECK(ev.maxCoeff() < 2.0 + 1e-12);
      // Pairs with a trace-preserving Choi state into a probability.
      for (int t = 0; t < 3; ++t) {
        const double prob = hs_inner(pe, bcsz_channel(2, 2, rng).matrix()).real();
        CHECK(prob > -1e-12);
        CHECK(prob < 1.0 + 1e-12);
      }
    }
  }
  CHECK_THROWS(qpt_design(*cb, 6, 0, 1));
}

TEST_CASE("adaptive choice") {
  const auto cb = pauli_basis(2);
  std::vector<ExperimentDesign> props;
  RngStream rng(4);
  for (int k = 0; k < 20; ++k) props.push_back(random_qpt_design(*cb, 1, rng));
  CHECK(adaptive_choice(props, RMatrix::Zero(16, 16)) == 0);
  CHECK_THROWS_AS(adaptive_choice({}, RMatrix::Zero(16, 16)), InvalidArgument);

  RVector e = RVector::Zero(16);
  e(5) = 0.6;
  e(10) = -0.8;
  const RMatrix rank1 = 0.01 * e * e.transpose();
  std::size_t best = 0;
  for (std::size_t k = 1; k < props.size(); ++k) {
    if (std::abs(props[k].effect.coords.dot(e)) > std::abs(props[best].effect.coords.dot(e))) best = k;
  }
  CHECK(adaptive_choice(props, rank1) == best);

  std::mt19937_64 g(5);
  std::normal_distribution<double> n;
  for (int t = 0; t < 100; ++t) {
    RMatrix a(16, 16);
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) a(i, j) = n(g);
    const RMatrix cov = a * a.transpose();
    const auto scores = adaptive_scores(props, cov);
    const std::size_t k = adaptive_choice(props, cov);
    double mean = 0.0;
    for (double s : scores) mean += s / scores.size();
    CHECK(scores[k] >= mean);
    CHECK(adaptive_choice(props, 7.5 * cov) == k);
  }
}

TEST_CASE("scheduled choice") {
  RngStream rng(6);
  for (int t = 0; t < 100; ++t) CHECK(scheduled_choice({1.0, 0.0}, rng) == 0);
  int first = 0;
  const int n = 10000;
  for (int t = 0; t < n; ++t) first += scheduled_choice({0.2, 0.8}, rng) == 0;
  CHECK(std::abs(first / static_cast<double>(n) - 0.2) < 0.02);
  RngStream a(7), b(7);
  for (int t = 0; t < 100; ++t) CHECK(scheduled_choice({0.3, 0.3, 0.4}, a) == scheduled_choice({0.3, 0.3, 0.4}, b));
  CHECK_THROWS_AS(scheduled_choice({0.5, 0.6}, rng), InvalidArgument);
  CHECK_THROWS_AS(scheduled_choice({1.2, -0.2}, rng), InvalidArgument);
}

TEST_CASE("heuristics emit valid designs") {
  const auto cb = pauli_basis(2);
  auto model = std::make_shared<const Model>(std::make_shared<ChoiSpace>(cb, 2));
  ChoiSpace space(cb, 2);
  RngStream rng(8);
  SmcUpdater u(model, init_cloud(bcsz_prior(cb, 2, 4), space, 300, rng), SmcOptions{}, RngStream(9));
  std::vector<HeuristicPtr> parts;
  parts.push_back(make_random_qpt(cb, 10));
  parts.push_back(make_adaptive_qpt(cb, 10, 50));
  auto mix = make_scheduled_mix(std::move(parts), {0.2, 0.8});
  CHECK(mix->kind() == HeuristicKind::scheduled_mix);
  for (std::size_t step = 0; step < 50; ++step) {
    const auto d = mix->next(step, u, rng);
    CHECK(d.n_meas == 10);
    CHECK(d.effect.basis_id == cb->name());
    const auto ev = oracle::eigenvalues(cb->matrix(d.effect.coords));
    CHECK(ev.minCoeff() > -1e-12);
  }
  // With the adaptive part only, the choice is the best of its proposals.
  auto adaptive = make_adaptive_qpt(cb, 10, 50);
  RngStream r1(10);
  const auto chosen = adaptive->next(0, u, r1);
  const auto cov = u.covariance();
  const double chosen_score = chosen.effect.coords.dot(cov * chosen.effect.coords);
  RngStream r2(11);
  double typical = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto d = random_qpt_design(*cb, 10, r2);
    typical += d.effect.coords.dot(cov * d.effect.coords) / 50.0;
  }
  CHECK(chosen_score >= typical);

  auto coin = make_coin_heuristic(4);
  CHECK(coin->kind() == HeuristicKind::coin);
}

}  // TEST_SUITE
