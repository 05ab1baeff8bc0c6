#pragma once

// Config-driven simulation runs and their records.
//
// A run is fully determined by its JSON config and seed: every random choice
// is drawn from a child of RngStream(seed) with a fixed role index, so the
// record files are byte-identical across repeats and thread counts.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomolab/design.hpp"
#include "tomolab/likelihood.hpp"
#include "tomolab/priors.hpp"
#include "tomolab/qobj.hpp"
#include "tomolab/smc.hpp"
#include "tomolab/state_space.hpp"
#include "tomolab/tracking.hpp"

namespace tomolab::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Mode { sample, estimate, qpt, track, risk };
enum class ModelKind { state, channel, coin };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

struct ModelSpec {
  ModelKind kind = ModelKind::state;
  std::size_t dim = 2;        // D; channels act on C^D
  std::string basis = "auto";  // pauli | gellmann | auto
};

struct PriorSpec {
  std::string label = "prior";
  std::string fiducial = "ginibre";  // ginibre | bures | rebit | bcsz | uniform
  std::size_t rank = 0;              // 0: full rank
  std::optional<json> mean;          // GAD mean: matrix / channel spec, or p for coins
};

struct TruthSpec {
  std::optional<json> value;     // explicit state / channel / coin bias
  std::optional<PriorSpec> prior;  // draw the truth from this prior instead
};

struct HeuristicSpec {
  std::string kind = "auto";  // random_pauli | random_stabilizer_qutrit | random_qpt | adaptive | scheduled_mix | coin
  unsigned n_meas = 10;
  std::size_t n_proposals = 50;
  double adaptive_fraction = 0.8;
};

struct TrackingSpec {
  double dt = 1.0;
  std::string trajectory = "static";  // static | two_tone | single_tone | diffusing_state
  std::vector<double> frequencies;
  double truth_step_std = 0.0045;  // diffusing_state only
  EtaPrior eta;
};

struct RunConfig {
  Mode mode = Mode::estimate;
  ModelSpec model;
  std::vector<PriorSpec> priors;  // risk mode compares all; other modes use the first
  TruthSpec truth;
  HeuristicSpec heuristic;
  std::size_t n_particles = 2000;
  std::size_t n_experiments = 30;
  std::size_t n_trials = 1;
  SmcOptions smc;
  TrackingSpec tracking;
  double ellipsoid_z = 3.0;
  std::uint64_t seed = 0;
};

/// Throws ConfigError with a message naming the offending field.
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::filesystem::path& path);
json config_to_json(const RunConfig& config);

/// Matrix specs: "maximally_mixed", {"diag": [...]}, {"pauli": {"X": 0.9, ...}}
/// meaning (1 + sum_P c_P P) / D, {"real": [[...]], "imag": [[...]]},
/// {"pure": [re...] or {"re": [...], "im": [...]}}, {"mix": [{"weight": w, "state": spec}, ...]}.
CMatrix resolve_state(const json& spec, std::size_t dim);
/// Channel specs (result is J/D): "identity", "depolarizing",
/// {"unitary_mixture": [{"weight": w, "unitary": "H"}, ...]} with unitaries I, X, Y, Z, H, S,
/// {"mix": [{"weight": w, "channel": spec}, ...]}.
CMatrix resolve_channel(const json& spec, std::size_t dim);

/// (x_est - x_true)^T q (x_est - x_true); identity q when omitted.
double quadratic_loss(const VectorizedOperator& est, const VectorizedOperator& truth,
                      const std::optional<RMatrix>& q = std::nullopt);

/// Everything a run needs, resolved from a config.
struct Setup {
  BasisPtr basis;  // null for coins
  SpacePtr space;
  ModelPtr model;
  std::size_t channel_dim = 0;
};
Setup make_setup(const ModelSpec& spec);
/// Sampler for a prior spec in the given setup.
ParticleSampler make_sampler(const PriorSpec& spec, const Setup& setup);
HeuristicPtr make_heuristic(const HeuristicSpec& spec, const ModelSpec& model, const Setup& setup);

struct StepRow {
  std::size_t step = 0;
  double time = 0.0;
  std::string design;
  unsigned n_meas = 0;
  unsigned n_success = 0;
  RVector truth;
  RVector est_mean;
  double cov_trace = 0.0;
  double ess = 0.0;
  double log_norm = 0.0;
  double loss = 0.0;  // ||x_est - x_true||_2
  double eta_mean = 0.0;
  bool resampled = false;
};

struct RunRecord {
  std::string mode;
  std::string basis_id;
  std::vector<std::string> labels;
  std::vector<StepRow> rows;  // row 0 is the prior, before any datum
  PosteriorSummary final_summary;
  double final_mahalanobis2 = 0.0;
  bool truth_in_ellipsoid = false;
  bool failed = false;
  std::size_t failed_step = 0;
  std::string failure;
  std::size_t n_resamples = 0;
  json config;
};

/// Estimation loop: design, simulate, update, record. Degenerate updates mark
/// the record failed and the estimate is carried forward unchanged.
RunRecord run_estimation(const RunConfig& config);
/// run_estimation on Choi states; requires a channel model.
RunRecord run_qpt(const RunConfig& config);
/// Tracking loop: advance the truth, diffuse, design, simulate, update.
RunRecord run_tracking(const RunConfig& config);

struct RiskCurve {
  std::string label;
  std::vector<double> mean_loss;               // index = number of experiments
  std::vector<std::vector<double>> trial_loss;  // [trial][step]
  std::size_t n_failed = 0;
};

struct RiskRecord {
  std::vector<RiskCurve> curves;
  json config;
};

/// For each trial draws one truth and one data stream and runs every prior
/// on them (common random numbers).
RiskRecord run_risk(const RunConfig& config);

/// n draws of the named fiducial prior, one row per draw, in the default basis.
struct SampleDump {
  std::string basis_id;
  std::vector<std::string> labels;
  RowMatrix draws;
};
SampleDump sample_prior(const std::string& prior, std::size_t dim, std::size_t rank, std::size_t n,
                        std::uint64_t seed);

json record_to_json(const RunRecord& record);
json risk_to_json(const RiskRecord& record);

/// run_record.json, steps.csv, covariance.csv, and for channels principal_channel.csv.
void write_run(const RunRecord& record, const std::filesystem::path& out_dir);
/// risk.json and risk.csv.
void write_risk(const RiskRecord& record, const std::filesystem::path& out_dir);
/// samples.csv
void write_samples(const SampleDump& dump, const std::filesystem::path& out_dir);

}  // namespace tomolab::harness
