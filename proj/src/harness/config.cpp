#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tomolab/errors.hpp"
#include "tomolab/harness.hpp"

namespace tomolab::harness {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(where, "unknown field '" + item.key() + "'");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) fail(where + "." + key, "expected a number");
  return obj.at(key).get<double>();
}

std::uint64_t get_count(const json& obj, const std::string& key, const std::string& where,
                        std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(where + "." + key, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) fail(where + "." + key, "expected a string");
  return obj.at(key).get<std::string>();
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "state") return ModelKind::state;
  if (s == "channel") return ModelKind::channel;
  if (s == "coin") return ModelKind::coin;
  fail("model.kind", "expected state, channel or coin, got '" + s + "'");
}

std::string model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::state: return "state";
    case ModelKind::channel: return "channel";
    case ModelKind::coin: return "coin";
  }
  return "state";
}

PriorSpec parse_prior(const json& obj, const std::string& where) {
  reject_unknown(obj, where, {"label", "fiducial", "rank", "mean"});
  PriorSpec p;
  p.label = get_string(obj, "label", where, "prior");
  p.fiducial = get_string(obj, "fiducial", where, "ginibre");
  static const std::set<std::string> known{"ginibre", "bures", "rebit", "bcsz", "uniform"};
  if (!known.count(p.fiducial)) fail(where + ".fiducial", "unknown fiducial prior '" + p.fiducial + "'");
  p.rank = get_count(obj, "rank", where, 0);
  if (obj.contains("mean")) p.mean = obj.at("mean");
  return p;
}

json prior_to_json(const PriorSpec& p) {
  json j{{"label", p.label}, {"fiducial", p.fiducial}, {"rank", p.rank}};
  if (p.mean) j["mean"] = *p.mean;
  return j;
}

CMatrix pauli_letter(char c) {
  CMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: fail("pauli", std::string("unknown Pauli letter '") + c + "'");
  }
  return m;
}

CMatrix pauli_string(const std::string& label, std::size_t dim) {
  if (label.empty() || (std::size_t{1} << label.size()) != dim) {
    fail("pauli", "label '" + label + "' does not match dimension " + std::to_string(dim));
  }
  CMatrix m = pauli_letter(label[0]);
  for (std::size_t k = 1; k < label.size(); ++k) m = kron(m, pauli_letter(label[k]));
  return m;
}

RMatrix real_rows(const json& rows, std::size_t dim, const std::string& where) {
  if (!rows.is_array() || rows.size() != dim) fail(where, "expected " + std::to_string(dim) + " rows");
  RMatrix m(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    if (!rows[r].is_array() || rows[r].size() != dim) fail(where, "ragged matrix");
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

CVector amplitudes(const json& spec, std::size_t dim, const std::string& where) {
  CVector v(dim);
  if (spec.is_array()) {
    if (spec.size() != dim) fail(where, "expected " + std::to_string(dim) + " amplitudes");
    for (std::size_t k = 0; k < dim; ++k) v[k] = spec[k].get<double>();
  } else if (spec.is_object()) {
    reject_unknown(spec, where, {"re", "im"});
    const json& re = spec.at("re");
    if (re.size() != dim) fail(where, "expected " + std::to_string(dim) + " amplitudes");
    for (std::size_t k = 0; k < dim; ++k) {
      v[k] = Complex(re[k].get<double>(), spec.contains("im") ? spec.at("im")[k].get<double>() : 0.0);
    }
  } else {
    fail(where, "expected amplitudes");
  }
  if (v.norm() == 0.0) fail(where, "zero vector");
  return v.normalized();
}

CMatrix raw_state(const json& spec, std::size_t dim, const std::string& where) {
  if (spec.is_string()) {
    if (spec.get<std::string>() == "maximally_mixed") return identity(dim) / static_cast<double>(dim);
    fail(where, "unknown state '" + spec.get<std::string>() + "'");
  }
  if (!spec.is_object() || spec.size() != 1) fail(where, "expected a single-key state spec");
  const std::string key = spec.begin().key();
  const json& v = spec.begin().value();
  if (key == "diag") {
    if (!v.is_array() || v.size() != dim) fail(where + ".diag", "expected " + std::to_string(dim) + " entries");
    CMatrix m = CMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) m(k, k) = v[k].get<double>();
    return m;
  }
  if (key == "pauli") {
    if (!v.is_object()) fail(where + ".pauli", "expected {label: coefficient}");
    CMatrix m = identity(dim);
    for (const auto& item : v.items()) m += item.value().get<double>() * pauli_string(item.key(), dim);
    return m / static_cast<double>(dim);
  }
  if (key == "real" || key == "matrix") {
    return real_rows(v, dim, where + "." + key).cast<Complex>();
  }
  if (key == "complex") {
    reject_unknown(v, where + ".complex", {"real", "imag"});
    CMatrix m = real_rows(v.at("real"), dim, where + ".complex.real").cast<Complex>();
    if (v.contains("imag")) m += Complex(0.0, 1.0) * real_rows(v.at("imag"), dim, where + ".complex.imag").cast<Complex>();
    return m;
  }
  if (key == "pure") {
    const CVector psi = amplitudes(v, dim, where + ".pure");
    return psi * psi.adjoint();
  }
  if (key == "mix") {
    if (!v.is_array() || v.empty()) fail(where + ".mix", "expected a nonempty list");
    CMatrix m = CMatrix::Zero(dim, dim);
    for (const auto& part : v) {
      reject_unknown(part, where + ".mix[]", {"weight", "state"});
      m += part.at("weight").get<double>() * raw_state(part.at("state"), dim, where + ".mix[].state");
    }
    return m;
  }
  fail(where, "unknown state spec '" + key + "'");
}

CMatrix named_unitary(const std::string& name, std::size_t dim) {
  if (name == "I") return identity(dim);
  if (dim != 2) fail("unitary", "only I is available outside dimension 2");
  if (name == "X" || name == "Y" || name == "Z") return pauli_letter(name[0]);
  CMatrix u(2, 2);
  if (name == "H") {
    u << 1, 1, 1, -1;
    return u / std::sqrt(2.0);
  }
  if (name == "S") {
    u << 1, 0, 0, Complex(0.0, 1.0);
    return u;
  }
  fail("unitary", "unknown unitary '" + name + "'");
}

CMatrix raw_channel(const json& spec, std::size_t dim, const std::string& where) {
  const std::size_t d2 = dim * dim;
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    if (name == "depolarizing") return identity(d2) / static_cast<double>(d2);
    if (name == "identity") return choi_of_channel({identity(dim)}).matrix();
    fail(where, "unknown channel '" + name + "'");
  }
  if (!spec.is_object() || spec.size() != 1) fail(where, "expected a single-key channel spec");
  const std::string key = spec.begin().key();
  const json& v = spec.begin().value();
  if (key == "unitary_mixture") {
    if (!v.is_array() || v.empty()) fail(where + ".unitary_mixture", "expected a nonempty list");
    std::vector<CMatrix> kraus;
    for (const auto& part : v) {
      reject_unknown(part, where + ".unitary_mixture[]", {"weight", "unitary"});
      const double w = part.at("weight").get<double>();
      if (w < 0.0) fail(where + ".unitary_mixture[]", "negative weight");
      kraus.push_back(std::sqrt(w) * named_unitary(part.at("unitary").get<std::string>(), dim));
    }
    try {
      return choi_of_channel(kraus).matrix();
    } catch (const InvalidOperator& e) {
      fail(where, e.what());
    }
  }
  if (key == "mix") {
    if (!v.is_array() || v.empty()) fail(where + ".mix", "expected a nonempty list");
    CMatrix m = CMatrix::Zero(d2, d2);
    for (const auto& part : v) {
      reject_unknown(part, where + ".mix[]", {"weight", "channel"});
      m += part.at("weight").get<double>() * raw_channel(part.at("channel"), dim, where + ".mix[].channel");
    }
    return m;
  }
  fail(where, "unknown channel spec '" + key + "'");
}

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "sample") return Mode::sample;
  if (name == "estimate") return Mode::estimate;
  if (name == "qpt") return Mode::qpt;
  if (name == "track") return Mode::track;
  if (name == "risk") return Mode::risk;
  fail("mode", "expected sample, estimate, qpt, track or risk, got '" + name + "'");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::sample: return "sample";
    case Mode::estimate: return "estimate";
    case Mode::qpt: return "qpt";
    case Mode::track: return "track";
    case Mode::risk: return "risk";
  }
  return "estimate";
}

CMatrix resolve_state(const json& spec, std::size_t dim) {
  try {
    return DensityOperator::from_matrix(raw_state(spec, dim, "state"), 1e-9).matrix();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    fail("state", e.what());
  } catch (const Error& e) {
    fail("state", e.what());
  }
}

CMatrix resolve_channel(const json& spec, std::size_t dim) {
  try {
    return ChoiState::from_matrix(raw_channel(spec, dim, "channel"), dim).matrix();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    fail("channel", e.what());
  } catch (const Error& e) {
    fail("channel", e.what());
  }
}

RunConfig parse_config(const json& doc) {
  try {
    reject_unknown(doc, "config",
                   {"schema_version", "mode", "model", "prior", "priors", "truth", "heuristic", "n_particles",
                    "n_experiments", "n_trials", "smc", "tracking", "ellipsoid_z", "seed", "description"});
    RunConfig c;
    const auto version = get_count(doc, "schema_version", "config", kSchemaVersion);
    if (version != static_cast<std::uint64_t>(kSchemaVersion)) {
      fail("schema_version", "unsupported version " + std::to_string(version));
    }
    if (!doc.contains("mode")) fail("config", "missing 'mode'");
    c.mode = parse_mode(get_string(doc, "mode", "config", ""));

    if (doc.contains("model")) {
      const json& m = doc.at("model");
      reject_unknown(m, "model", {"kind", "dim", "basis"});
      c.model.kind = parse_model_kind(get_string(m, "kind", "model", "state"));
      c.model.dim = get_count(m, "dim", "model", c.model.kind == ModelKind::coin ? 2 : 2);
      c.model.basis = get_string(m, "basis", "model", "auto");
      if (c.model.basis != "auto" && c.model.basis != "pauli" && c.model.basis != "gellmann") {
        fail("model.basis", "expected auto, pauli or gellmann");
      }
    }
    if (c.model.dim < 2 || c.model.dim > 16) fail("model.dim", "expected 2 <= dim <= 16");
    if (c.mode == Mode::qpt && c.model.kind != ModelKind::channel) fail("model.kind", "qpt mode needs a channel model");
    if (c.model.kind == ModelKind::channel && c.model.dim > 4) fail("model.dim", "channels are limited to dim <= 4");

    if (doc.contains("prior") && doc.contains("priors")) fail("config", "give either 'prior' or 'priors'");
    if (doc.contains("prior")) c.priors.push_back(parse_prior(doc.at("prior"), "prior"));
    if (doc.contains("priors")) {
      const json& ps = doc.at("priors");
      if (!ps.is_array() || ps.empty()) fail("priors", "expected a nonempty list");
      for (std::size_t i = 0; i < ps.size(); ++i) c.priors.push_back(parse_prior(ps[i], "priors[" + std::to_string(i) + "]"));
    }
    if (c.priors.empty()) {
      PriorSpec p;
      p.fiducial = c.model.kind == ModelKind::coin ? "uniform" : c.model.kind == ModelKind::channel ? "bcsz" : "ginibre";
      c.priors.push_back(p);
    }

    if (doc.contains("truth")) {
      const json& t = doc.at("truth");
      reject_unknown(t, "truth", {"state", "channel", "p", "prior"});
      if (t.contains("prior")) c.truth.prior = parse_prior(t.at("prior"), "truth.prior");
      for (const char* key : {"state", "channel", "p"}) {
        if (t.contains(key)) {
          if (c.truth.value) fail("truth", "give exactly one of state, channel, p, prior");
          c.truth.value = t.at(key);
        }
      }
      if (c.truth.value && c.truth.prior) fail("truth", "give exactly one of state, channel, p, prior");
    }

    if (doc.contains("heuristic")) {
      const json& h = doc.at("heuristic");
      reject_unknown(h, "heuristic", {"kind", "n_meas", "n_proposals", "adaptive_fraction"});
      c.heuristic.kind = get_string(h, "kind", "heuristic", "auto");
      static const std::set<std::string> known{"auto", "random_pauli", "random_stabilizer_qutrit", "random_qpt",
                                               "adaptive", "scheduled_mix", "coin"};
      if (!known.count(c.heuristic.kind)) fail("heuristic.kind", "unknown heuristic '" + c.heuristic.kind + "'");
      c.heuristic.n_meas = static_cast<unsigned>(get_count(h, "n_meas", "heuristic", 10));
      c.heuristic.n_proposals = get_count(h, "n_proposals", "heuristic", 50);
      c.heuristic.adaptive_fraction = get_number(h, "adaptive_fraction", "heuristic", 0.8);
    }
    if (c.heuristic.n_meas < 1) fail("heuristic.n_meas", "must be at least 1");
    if (c.heuristic.n_proposals < 1) fail("heuristic.n_proposals", "must be at least 1");
    if (!(c.heuristic.adaptive_fraction >= 0.0 && c.heuristic.adaptive_fraction <= 1.0)) {
      fail("heuristic.adaptive_fraction", "must lie in [0, 1]");
    }

    c.n_particles = get_count(doc, "n_particles", "config", 2000);
    c.n_experiments = get_count(doc, "n_experiments", "config", 30);
    c.n_trials = get_count(doc, "n_trials", "config", 1);
    if (c.n_particles < 2) fail("n_particles", "must be at least 2");
    if (c.n_trials < 1) fail("n_trials", "must be at least 1");

    if (doc.contains("smc")) {
      const json& s = doc.at("smc");
      reject_unknown(s, "smc", {"resample_threshold", "liu_west_a"});
      c.smc.resample_threshold = get_number(s, "resample_threshold", "smc", 0.5);
      c.smc.liu_west_a = get_number(s, "liu_west_a", "smc", 0.98);
    }
    if (!(c.smc.liu_west_a > 0.0 && c.smc.liu_west_a <= 1.0)) fail("smc.liu_west_a", "must lie in (0, 1]");
    if (!(c.smc.resample_threshold >= 0.0 && c.smc.resample_threshold <= 1.0)) {
      fail("smc.resample_threshold", "must lie in [0, 1]");
    }

    if (doc.contains("tracking")) {
      const json& t = doc.at("tracking");
      reject_unknown(t, "tracking", {"dt", "trajectory", "frequencies", "truth_step_std", "eta_mean", "eta_log_std"});
      c.tracking.dt = get_number(t, "dt", "tracking", 1.0);
      c.tracking.trajectory = get_string(t, "trajectory", "tracking", "static");
      if (t.contains("frequencies")) c.tracking.frequencies = t.at("frequencies").get<std::vector<double>>();
      c.tracking.truth_step_std = get_number(t, "truth_step_std", "tracking", 0.0045);
      c.tracking.eta.mean = get_number(t, "eta_mean", "tracking", 0.006);
      c.tracking.eta.log_std = get_number(t, "eta_log_std", "tracking", 1.0);
    }
    if (!(c.tracking.dt > 0.0)) fail("tracking.dt", "must be positive");
    if (c.tracking.eta.mean < 0.0 || c.tracking.eta.log_std < 0.0) fail("tracking", "eta prior needs mean, log_std >= 0");
    const std::string& traj = c.tracking.trajectory;
    if (traj != "static" && traj != "two_tone" && traj != "single_tone" && traj != "diffusing_state") {
      fail("tracking.trajectory", "unknown trajectory '" + traj + "'");
    }
    if (traj == "two_tone" && c.tracking.frequencies.size() != 2) fail("tracking.frequencies", "two_tone needs two frequencies");
    if (traj == "single_tone" && c.tracking.frequencies.size() != 1) fail("tracking.frequencies", "single_tone needs one frequency");
    if ((traj == "two_tone" || traj == "single_tone") && c.model.kind != ModelKind::coin) {
      fail("tracking.trajectory", traj + " trajectories are defined for coins");
    }
    if (traj == "diffusing_state" && c.model.kind != ModelKind::state) {
      fail("tracking.trajectory", "diffusing_state needs a state model");
    }

    c.ellipsoid_z = get_number(doc, "ellipsoid_z", "config", 3.0);
    if (!(c.ellipsoid_z > 0.0)) fail("ellipsoid_z", "must be positive");
    c.seed = get_count(doc, "seed", "config", 0);
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const RunConfig& c) {
  json priors = json::array();
  for (const auto& p : c.priors) priors.push_back(prior_to_json(p));
  json truth = json::object();
  if (c.truth.value) {
    const char* key = c.model.kind == ModelKind::coin ? "p" : c.model.kind == ModelKind::channel ? "channel" : "state";
    truth[key] = *c.truth.value;
  }
  if (c.truth.prior) truth["prior"] = prior_to_json(*c.truth.prior);
  return json{
      {"schema_version", kSchemaVersion},
      {"mode", mode_name(c.mode)},
      {"model", {{"kind", model_kind_name(c.model.kind)}, {"dim", c.model.dim}, {"basis", c.model.basis}}},
      {"priors", priors},
      {"truth", truth},
      {"heuristic",
       {{"kind", c.heuristic.kind},
        {"n_meas", c.heuristic.n_meas},
        {"n_proposals", c.heuristic.n_proposals},
        {"adaptive_fraction", c.heuristic.adaptive_fraction}}},
      {"n_particles", c.n_particles},
      {"n_experiments", c.n_experiments},
      {"n_trials", c.n_trials},
      {"smc", {{"resample_threshold", c.smc.resample_threshold}, {"liu_west_a", c.smc.liu_west_a}}},
      {"tracking",
       {{"dt", c.tracking.dt},
        {"trajectory", c.tracking.trajectory},
        {"frequencies", c.tracking.frequencies},
        {"truth_step_std", c.tracking.truth_step_std},
        {"eta_mean", c.tracking.eta.mean},
        {"eta_log_std", c.tracking.eta.log_std}}},
      {"ellipsoid_z", c.ellipsoid_z},
      {"seed", c.seed},
  };
}

}  // namespace tomolab::harness
