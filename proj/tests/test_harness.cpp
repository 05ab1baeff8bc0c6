#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tomolab/errors.hpp"
#include "tomolab/harness.hpp"

using namespace tomolab;
using namespace tomolab::harness;

namespace {

json rebit_config(std::uint64_t seed, std::size_t n_experiments = 30) {
  json doc = json::parse(R"({
    "schema_version": 1,
    "mode": "estimate",
    "model": {"kind": "state", "dim": 2, "basis": "pauli"},
    "prior": {"label": "wrong", "fiducial": "rebit", "mean": {"pauli": {"X": -0.9}}},
    "truth": {"state": {"pauli": {"X": 0.9}}},
    "heuristic": {"kind": "random_pauli", "n_meas": 10},
    "n_particles": 500
  })");
  doc["seed"] = seed;
  doc["n_experiments"] = n_experiments;
  return doc;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("quadratic loss") {
  const auto b = pauli_basis(1);
  CMatrix up = CMatrix::Zero(2, 2), down = CMatrix::Zero(2, 2);
  up(0, 0) = 1;
  down(1, 1) = 1;
  const auto u = vectorize(up, *b), d = vectorize(down, *b);
  CHECK(quadratic_loss(u, u) == 0.0);
  CHECK(std::sqrt(quadratic_loss(u, d)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs((u.coords - d.coords)(3)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  std::mt19937_64 g(1);
  const auto gb = gell_mann_basis(3);
  for (int t = 0; t < 100; ++t) {
    const CMatrix r = oracle::random_state(3, g), s = oracle::random_state(3, g);
    const double direct = ((r - s) * (r - s)).trace().real();
    CHECK(std::abs(quadratic_loss(vectorize(r, *gb), vectorize(s, *gb)) - direct) < 1e-12);
  }
  RMatrix q = RMatrix::Identity(4, 4) * 2.0;
  CHECK(quadratic_loss(u, d, q) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(quadratic_loss(u, vectorize(CMatrix::Identity(3, 3) / 3.0, *gb)), DimensionMismatch);
}

TEST_CASE("config parsing is strict") {
  CHECK_NOTHROW(parse_config(rebit_config(1)));
  auto bad = rebit_config(1);
  bad["n_particle"] = 10;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = rebit_config(1);
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = rebit_config(1);
  bad["model"]["dim"] = 1;
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = rebit_config(1);
  bad["mode"] = "simulate";
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
  bad = rebit_config(1);
  bad["prior"]["mean"] = {{"pauli", {{"X", -1.0}}}};
  CHECK_THROWS_AS(run_estimation(parse_config(bad)), ConfigError);
  try {
    bad = rebit_config(1);
    bad["heuristic"]["n_mes"] = 3;
    parse_config(bad);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("n_mes") != std::string::npos);
  }
  const auto round = parse_config(config_to_json(parse_config(rebit_config(4))));
  CHECK(config_to_json(round) == config_to_json(parse_config(rebit_config(4))));
}

TEST_CASE("state and channel specs") {
  const CMatrix x = resolve_state(json::parse(R"({"pauli": {"X": 0.9}})"), 2);
  CHECK(oracle::max_abs(x - 0.5 * (oracle::pauli('I') + 0.9 * oracle::pauli('X'))) < 1e-15);
  const CMatrix d = resolve_state(json::parse(R"({"diag": [0.9, 0.05, 0.05]})"), 3);
  CHECK(std::abs(d(0, 0) - 0.9) < 1e-15);
  CHECK(oracle::max_abs(resolve_state("maximally_mixed", 3) - CMatrix::Identity(3, 3) / 3.0) < 1e-15);
  CHECK_THROWS_AS(resolve_state(json::parse(R"({"diag": [1.2, -0.2]})"), 2), ConfigError);

  const CMatrix had = resolve_channel(
      json::parse(R"({"unitary_mixture": [{"weight": 0.7, "unitary": "I"}, {"weight": 0.3, "unitary": "H"}]})"), 2);
  const CMatrix expect =
      choi_of_channel({std::sqrt(0.7) * oracle::pauli('I'), std::sqrt(0.3) * oracle::hadamard()}).matrix();
  CHECK(oracle::max_abs(had - expect) < 1e-15);
  CHECK(oracle::max_abs(resolve_channel("depolarizing", 2) - CMatrix::Identity(4, 4) / 4.0) < 1e-15);
}

TEST_CASE("zero experiments report the prior mean") {
  const auto rec = run_estimation(parse_config(rebit_config(2, 0)));
  REQUIRE(rec.rows.size() == 1);
  CHECK((rec.rows[0].est_mean - rec.final_summary.mean.coords).cwiseAbs().maxCoeff() == 0.0);
  // The GAD mean sits at X = -0.9, i.e. coordinate -0.9 / sqrt(2).
  CHECK(rec.rows[0].est_mean(1) == doctest::Approx(-0.9 / std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("records are valid and reproducible") {
  const auto cfg = parse_config(rebit_config(3));
  const auto a = run_estimation(cfg);
  const auto b = run_estimation(cfg);
  CHECK(record_to_json(a).dump() == record_to_json(b).dump());
  const auto basis = pauli_basis(1);
  for (const auto& row : a.rows) {
    CHECK(row.loss >= 0.0);
    CHECK(row.ess >= 1.0 - 1e-9);
    CHECK(row.ess <= 500.0 + 1e-9);
    const CMatrix m = basis->matrix(row.est_mean);
    CHECK(oracle::eigenvalues(m).minCoeff() > -1e-10);
    CHECK(m.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(a.rows.back().cov_trace < a.rows.front().cov_trace);

  const auto dir = std::filesystem::temp_directory_path() / "tomolab_harness_test";
  std::filesystem::remove_all(dir);
  write_run(a, dir / "a");
  write_run(b, dir / "b");
  for (const char* f : {"run_record.json", "steps.csv", "covariance.csv"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK_FALSE(slurp(dir / "a" / f).empty());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("risk curves are pointwise means of the trials") {
  auto doc = rebit_config(5, 12);
  doc["mode"] = "risk";
  doc.erase("prior");
  doc["priors"] = json::parse(R"([{"label": "flat", "fiducial": "rebit"},
                                 {"label": "wrong", "fiducial": "rebit", "mean": {"pauli": {"X": -0.9}}}])");
  doc["n_trials"] = 6;
  doc["n_particles"] = 300;
  const auto risk = run_risk(parse_config(doc));
  REQUIRE(risk.curves.size() == 2);
  for (const auto& c : risk.curves) {
    REQUIRE(c.trial_loss.size() == 6);
    for (std::size_t k = 0; k < c.mean_loss.size(); ++k) {
      double m = 0.0;
      for (const auto& tl : c.trial_loss) m += tl[k];
      CHECK(std::abs(c.mean_loss[k] - m / 6.0) < 1e-12);
      CHECK(c.mean_loss[k] >= 0.0);
    }
  }

  doc["n_trials"] = 1;
  const auto one = run_risk(parse_config(doc));
  auto est = doc;
  est["mode"] = "estimate";
  est.erase("priors");
  est.erase("n_trials");
  est["prior"] = doc["priors"][1];
  const auto rec = run_estimation(parse_config(est));
  REQUIRE(rec.rows.size() == one.curves[1].mean_loss.size());
  for (std::size_t k = 0; k < rec.rows.size(); ++k) CHECK(rec.rows[k].loss == one.curves[1].mean_loss[k]);
}

TEST_CASE("output does not depend on the thread count") {
  auto doc = rebit_config(6, 10);
  doc["mode"] = "risk";
  doc["n_trials"] = 4;
  doc["n_particles"] = 300;
  const auto cfg = parse_config(doc);
  setenv("TOMOLAB_THREADS", "1", 1);
  const auto serial = risk_to_json(run_risk(cfg)).dump();
  unsetenv("TOMOLAB_THREADS");
  CHECK(serial == risk_to_json(run_risk(cfg)).dump());
}

TEST_CASE("static tracking with a tiny eta matches estimation") {
  std::vector<double> est_loss, track_loss;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto doc = rebit_config(100 + seed);
    est_loss.push_back(run_estimation(parse_config(doc)).rows.back().loss);
    doc["mode"] = "track";
    doc["tracking"] = {{"trajectory", "static"}, {"eta_mean", 1e-6}, {"eta_log_std", 0.5}};
    const auto rec = run_tracking(parse_config(doc));
    CHECK(rec.rows.back().eta_mean < 1e-5);
    track_loss.push_back(rec.rows.back().loss);
  }
  const auto ci = [](const std::vector<double>& v) {
    double m = 0, s = 0;
    for (double x : v) m += x / v.size();
    for (double x : v) s += (x - m) * (x - m) / (v.size() - 1);
    const double h = 1.96 * std::sqrt(s / v.size());
    return std::pair{m - h, m + h};
  };
  const auto [lo1, hi1] = ci(est_loss);
  const auto [lo2, hi2] = ci(track_loss);
  CHECK(lo1 <= hi2);
  CHECK(lo2 <= hi1);
}

TEST_CASE("sample dumps") {
  const auto s = sample_prior("bcsz", 2, 2, 50, 9);
  CHECK(s.draws.rows() == 50);
  CHECK(s.draws.cols() == 16);
  const auto again = sample_prior("bcsz", 2, 2, 50, 9);
  CHECK(s.draws == again.draws);
  const auto g = sample_prior("ginibre", 3, 0, 20, 9);
  CHECK(g.draws.cols() == 9);
  CHECK_THROWS_AS(sample_prior("wishart", 2, 0, 5, 1), ConfigError);
}

}  // TEST_SUITE
