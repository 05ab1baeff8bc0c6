#include <cmath>
#include <numbers>
#include <random>

#include "tomolab/errors.hpp"
#include "tomolab/harness.hpp"
#include "tomolab/parallel.hpp"
#include "tomolab/randq.hpp"

namespace tomolab::harness {

namespace {

// Fixed role indices: each kind of randomness has its own child stream.
struct Roles {
  RngStream truth, prior, design, data, smc, eta, diffusion, walk;
  explicit Roles(const RngStream& root)
      : truth(root.split(1)),
        prior(root.split(2)),
        design(root.split(3)),
        data(root.split(4)),
        smc(root.split(5)),
        eta(root.split(6)),
        diffusion(root.split(7)),
        walk(root.split(8)) {}
};

bool power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t log2_exact(std::size_t n) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

BasisPtr basis_for(const std::string& name, std::size_t dim) {
  const bool pauli = name == "pauli" || (name == "auto" && power_of_two(dim));
  if (pauli) {
    if (!power_of_two(dim)) throw ConfigError("model.basis: the Pauli basis needs a power-of-two dimension");
    return pauli_basis(log2_exact(dim));
  }
  return gell_mann_basis(dim);
}

double coin_mean(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a probability");
  return v.get<double>();
}

// Truth trajectory: fixed, a deterministic coin waveform, or a diffusing state.
class Trajectory {
 public:
  Trajectory(const RunConfig& c, const Setup& s, RVector initial, RngStream walk)
      : config_(c), setup_(s), current_(std::move(initial)), walk_(walk) {}

  const RVector& at(std::size_t step) {
    const TrackingSpec& t = config_.tracking;
    const double time = static_cast<double>(step) * t.dt;
    const double two_pi = 2.0 * std::numbers::pi;
    if (t.trajectory == "two_tone") {
      current_[0] = 0.25 * (2.0 + std::cos(two_pi * t.frequencies[0] * time) + std::cos(two_pi * t.frequencies[1] * time));
    } else if (t.trajectory == "single_tone") {
      current_[0] = 0.5 + 0.5 * std::cos(two_pi * t.frequencies[0] * time);
    } else if (t.trajectory == "diffusing_state") {
      while (walked_ < step) {
        std::normal_distribution<double> normal(0.0, t.truth_step_std);
        for (Eigen::Index j = static_cast<Eigen::Index>(setup_.space->first_free()); j < current_.size(); ++j) {
          current_[j] += normal(walk_);
        }
        setup_.space->project({current_.data(), static_cast<std::size_t>(current_.size())});
        ++walked_;
      }
    }
    return current_;
  }

 private:
  const RunConfig& config_;
  const Setup& setup_;
  RVector current_;
  RngStream walk_;
  std::size_t walked_ = 0;
};

bool tracks_waveform(const RunConfig& c) {
  return c.mode == Mode::track && (c.tracking.trajectory == "two_tone" || c.tracking.trajectory == "single_tone");
}

RVector initial_truth(const RunConfig& c, const Setup& s, RngStream& rng) {
  RVector x;
  if (c.truth.prior) {
    x = make_sampler(*c.truth.prior, s)(rng);
  } else if (c.truth.value) {
    switch (c.model.kind) {
      case ModelKind::coin:
        x = RVector::Constant(1, coin_mean(*c.truth.value, "truth.p"));
        if (x[0] < 0.0 || x[0] > 1.0) throw ConfigError("truth.p: must lie in [0, 1]");
        break;
      case ModelKind::state:
        x = s.basis->coords(resolve_state(*c.truth.value, c.model.dim));
        break;
      case ModelKind::channel:
        x = s.basis->coords(resolve_channel(*c.truth.value, c.model.dim));
        break;
    }
  } else if (tracks_waveform(c)) {
    x = RVector::Constant(1, 0.5);
  } else {
    throw ConfigError("truth: missing");
  }
  s.space->project({x.data(), static_cast<std::size_t>(x.size())});
  return x;
}

RunRecord run_single(const RunConfig& c, const Setup& s, const PriorSpec& prior_spec, Trajectory traj,
                     Roles roles, bool tracking) {
  RunRecord rec;
  rec.mode = mode_name(c.mode);
  rec.basis_id = s.space->basis_id();
  rec.labels = s.basis ? s.basis->labels() : std::vector<std::string>{"p"};
  rec.config = config_to_json(c);

  const ParticleSampler sampler = make_sampler(prior_spec, s);
  ParticleCloud cloud = init_cloud(sampler, *s.space, c.n_particles, roles.prior);
  if (tracking) attach_etas(cloud, c.tracking.eta, roles.eta);
  SmcUpdater updater(s.model, std::move(cloud), c.smc, roles.smc);
  HeuristicPtr heuristic = make_heuristic(c.heuristic, c.model, s);
  const std::size_t fixed = s.space->first_free();

  auto push_row = [&](std::size_t step, double time, const RVector& truth, const Datum* datum, double log_norm,
                      bool resampled) {
    StepRow row;
    row.step = step;
    row.time = time;
    if (datum) {
      row.design = datum->design.label;
      row.n_meas = datum->design.n_meas;
      row.n_success = datum->n_success;
    }
    row.truth = truth;
    row.est_mean = updater.mean();
    row.cov_trace = posterior_covariance(updater.cloud(), fixed).trace();
    row.ess = updater.ess();
    row.log_norm = log_norm;
    row.loss = std::sqrt(quadratic_loss(VectorizedOperator{row.est_mean, rec.basis_id},
                                        VectorizedOperator{truth, rec.basis_id}));
    row.eta_mean = eta_mean(updater.cloud());
    row.resampled = resampled;
    rec.rows.push_back(std::move(row));
  };

  push_row(0, 0.0, traj.at(0), nullptr, 0.0, false);
  const DiffusionStep step{c.tracking.dt, {}};
  for (std::size_t k = 1; k <= c.n_experiments; ++k) {
    const double time = tracking ? static_cast<double>(k) * c.tracking.dt : 0.0;
    const RVector truth = traj.at(tracking ? k : 0);
    if (tracking && !rec.failed) diffuse_cloud(updater.cloud(), *s.space, step, roles.diffusion);
    ExperimentDesign design = heuristic->next(k, updater, roles.design);
    design.time = time;
    const Datum datum = simulate_experiment(VectorizedOperator{truth, rec.basis_id}, design, roles.data);
    double log_norm = 0.0;
    bool resampled = false;
    if (!rec.failed) {
      const std::size_t before = updater.n_resamples();
      try {
        log_norm = updater.update(datum);
      } catch (const DegenerateUpdate& e) {
        rec.failed = true;
        rec.failed_step = k;
        rec.failure = e.what();
      }
      resampled = updater.n_resamples() != before;
    }
    push_row(k, time, truth, &datum, log_norm, resampled);
  }

  rec.final_summary = updater.summary();
  rec.n_resamples = updater.n_resamples();
  const CredibleEllipsoid region = credible_ellipsoid(updater.cloud(), c.ellipsoid_z, fixed);
  rec.final_mahalanobis2 = region.mahalanobis_squared(rec.rows.back().truth);
  rec.truth_in_ellipsoid = region.contains(rec.rows.back().truth);
  return rec;
}

RunRecord run_with_truth(const RunConfig& c, bool tracking) {
  const Setup s = make_setup(c.model);
  Roles roles(RngStream(c.seed, 0));
  RVector truth = initial_truth(c, s, roles.truth);
  return run_single(c, s, c.priors.front(), Trajectory(c, s, std::move(truth), roles.walk), roles, tracking);
}

}  // namespace

Setup make_setup(const ModelSpec& spec) {
  Setup s;
  switch (spec.kind) {
    case ModelKind::coin:
      s.space = std::make_shared<CoinSpace>();
      break;
    case ModelKind::state:
      s.basis = basis_for(spec.basis, spec.dim);
      s.space = std::make_shared<DensitySpace>(s.basis);
      break;
    case ModelKind::channel: {
      const std::size_t d2 = spec.dim * spec.dim;
      if (spec.basis == "gellmann" || !power_of_two(spec.dim)) {
        const BasisPtr g = gell_mann_basis(spec.dim);
        s.basis = tensor_basis(*g, *g);
      } else {
        s.basis = basis_for("pauli", d2);
      }
      s.channel_dim = spec.dim;
      s.space = std::make_shared<ChoiSpace>(s.basis, spec.dim);
      break;
    }
  }
  s.model = std::make_shared<Model>(s.space);
  return s;
}

ParticleSampler make_sampler(const PriorSpec& spec, const Setup& s) {
  try {
    if (!s.basis) {
      if (spec.fiducial != "uniform") throw ConfigError("prior.fiducial: coins use the uniform fiducial prior");
      const CoinPrior coin = coin_gad_params(spec.mean ? coin_mean(*spec.mean, "prior.mean") : 0.5);
      return [coin](RngStream& r) { return RVector::Constant(1, coin_gad_sample(coin, r)); };
    }
    const std::size_t dim = s.basis->dim();
    std::shared_ptr<PriorDistribution> prior;
    if (s.channel_dim > 0) {
      if (spec.fiducial != "bcsz") throw ConfigError("prior.fiducial: channels use the bcsz fiducial prior");
      prior = std::make_shared<PriorDistribution>(bcsz_prior(s.basis, s.channel_dim, spec.rank ? spec.rank : dim));
      if (spec.mean) prior = std::make_shared<PriorDistribution>(insightful_prior(*prior, resolve_channel(*spec.mean, s.channel_dim)));
    } else {
      if (spec.fiducial == "ginibre") {
        prior = std::make_shared<PriorDistribution>(ginibre_prior(s.basis, spec.rank ? spec.rank : dim));
      } else if (spec.fiducial == "bures") {
        prior = std::make_shared<PriorDistribution>(bures_prior(s.basis));
      } else if (spec.fiducial == "rebit") {
        prior = std::make_shared<PriorDistribution>(rebit_prior(s.basis, spec.rank ? spec.rank : 2));
      } else {
        throw ConfigError("prior.fiducial: '" + spec.fiducial + "' is not a state prior");
      }
      if (spec.mean) prior = std::make_shared<PriorDistribution>(insightful_prior(*prior, resolve_state(*spec.mean, dim)));
    }
    return [prior](RngStream& r) { return prior->sample(r); };
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("prior '" + spec.label + "': " + e.what());
  }
}

HeuristicPtr make_heuristic(const HeuristicSpec& spec, const ModelSpec& model, const Setup& s) {
  std::string kind = spec.kind;
  if (kind == "auto") {
    if (model.kind == ModelKind::coin) kind = "coin";
    else if (model.kind == ModelKind::channel) kind = "scheduled_mix";
    else if (s.basis->name().rfind("pauli", 0) == 0) kind = "random_pauli";
    else if (model.dim == 3) kind = "random_stabilizer_qutrit";
    else throw ConfigError("heuristic.kind: no default heuristic for this model");
  }
  const bool qpt_kind = kind == "random_qpt" || kind == "adaptive" || kind == "scheduled_mix";
  if (qpt_kind && (model.kind != ModelKind::channel || model.dim != 2)) {
    throw ConfigError("heuristic.kind: " + kind + " needs a qubit channel model");
  }
  if (kind == "coin" && model.kind != ModelKind::coin) throw ConfigError("heuristic.kind: coin needs a coin model");
  if (kind != "coin" && model.kind == ModelKind::coin) throw ConfigError("heuristic.kind: coin models use the coin heuristic");
  if (kind == "random_pauli") {
    if (model.kind != ModelKind::state || s.basis->name().rfind("pauli", 0) != 0) {
      throw ConfigError("heuristic.kind: random_pauli needs a state model in the Pauli basis");
    }
    return make_random_pauli(s.basis, spec.n_meas);
  }
  if (kind == "random_stabilizer_qutrit") {
    if (model.kind != ModelKind::state || model.dim != 3) {
      throw ConfigError("heuristic.kind: random_stabilizer_qutrit needs a qutrit state model");
    }
    return make_random_stabilizer_qutrit(s.basis, spec.n_meas);
  }
  if (kind == "random_qpt") return make_random_qpt(s.basis, spec.n_meas);
  if (kind == "adaptive") return make_adaptive_qpt(s.basis, spec.n_meas, spec.n_proposals);
  if (kind == "scheduled_mix") {
    std::vector<HeuristicPtr> parts;
    parts.push_back(make_random_qpt(s.basis, spec.n_meas));
    parts.push_back(make_adaptive_qpt(s.basis, spec.n_meas, spec.n_proposals));
    return make_scheduled_mix(std::move(parts), {1.0 - spec.adaptive_fraction, spec.adaptive_fraction});
  }
  return make_coin_heuristic(spec.n_meas);
}

RunRecord run_estimation(const RunConfig& config) { return run_with_truth(config, false); }

RunRecord run_qpt(const RunConfig& config) {
  if (config.model.kind != ModelKind::channel) throw ConfigError("model.kind: qpt runs need a channel model");
  return run_with_truth(config, false);
}

RunRecord run_tracking(const RunConfig& config) { return run_with_truth(config, true); }

RiskRecord run_risk(const RunConfig& config) {
  const Setup s = make_setup(config.model);
  const std::size_t n_priors = config.priors.size();
  const std::size_t n_steps = config.n_experiments + 1;
  std::vector<std::vector<std::vector<double>>> losses(
      n_priors, std::vector<std::vector<double>>(config.n_trials, std::vector<double>(n_steps, 0.0)));
  std::vector<std::vector<char>> failed(n_priors, std::vector<char>(config.n_trials, 0));
  parallel_for(config.n_trials, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      // Trial t is rooted at stream t, so trial 0 replays run_estimation exactly.
      Roles roles(RngStream(config.seed, t));
      const RVector truth = initial_truth(config, s, roles.truth);
      for (std::size_t p = 0; p < n_priors; ++p) {
        const RunRecord rec =
            run_single(config, s, config.priors[p], Trajectory(config, s, truth, roles.walk), roles, false);
        for (std::size_t k = 0; k < n_steps; ++k) losses[p][t][k] = rec.rows[k].loss;
        failed[p][t] = rec.failed ? 1 : 0;
      }
    }
  }, 1);

  RiskRecord out;
  out.config = config_to_json(config);
  for (std::size_t p = 0; p < n_priors; ++p) {
    RiskCurve curve;
    curve.label = config.priors[p].label;
    curve.mean_loss.assign(n_steps, 0.0);
    for (std::size_t t = 0; t < config.n_trials; ++t) {
      for (std::size_t k = 0; k < n_steps; ++k) curve.mean_loss[k] += losses[p][t][k];
      curve.n_failed += static_cast<std::size_t>(failed[p][t]);
    }
    for (double& v : curve.mean_loss) v /= static_cast<double>(config.n_trials);
    curve.trial_loss = std::move(losses[p]);
    out.curves.push_back(std::move(curve));
  }
  return out;
}

}  // namespace tomolab::harness
