#include "tomolab/design.hpp"

#include <cmath>
#include <numbers>

#include "tomolab/errors.hpp"

namespace tomolab {

namespace {

std::size_t uniform_index(std::size_t n, RngStream& rng) {
  return std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)));
}

void check_n_meas(unsigned n_meas) {
  if (n_meas < 1) throw InvalidArgument("n_meas must be at least 1");
}

}  // namespace

ExperimentDesign random_pauli_design(const OperatorBasis& basis, unsigned n_meas, RngStream& rng) {
  check_n_meas(n_meas);
  if (basis.name().rfind("pauli", 0) != 0) throw InvalidArgument("random Pauli designs need a Pauli basis");
  const std::size_t alpha = 1 + uniform_index(basis.size() - 1, rng);
  const double root_dim = std::sqrt(static_cast<double>(basis.dim()));
  const CMatrix effect = 0.5 * (identity(basis.dim()) + root_dim * basis.element(alpha));
  return make_design(Effect::from_matrix(effect), basis, n_meas, "+" + basis.labels()[alpha]);
}

const std::vector<CVector>& qutrit_stabilizer_states() {
  static const std::vector<CVector> states = [] {
    std::vector<CVector> out;
    for (int k = 0; k < 3; ++k) {
      CVector e = CVector::Zero(3);
      e[k] = 1.0;
      out.push_back(e);
    }
    const double w = 2.0 * std::numbers::pi / 3.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        CVector v(3);
        for (int k = 0; k < 3; ++k) v[k] = std::polar(1.0 / std::sqrt(3.0), w * ((a * k * k + b * k) % 3));
        out.push_back(v);
      }
    }
    return out;
  }();
  return states;
}

ExperimentDesign random_stabilizer_qutrit_design(const OperatorBasis& basis, unsigned n_meas,
                                                 RngStream& rng) {
  check_n_meas(n_meas);
  if (basis.dim() != 3) throw DimensionMismatch("qutrit stabilizer designs need a D = 3 basis");
  const auto& states = qutrit_stabilizer_states();
  const std::size_t s = uniform_index(states.size(), rng);
  return make_design(Effect::projector(states[s]), basis, n_meas, "s" + std::to_string(s));
}

const std::vector<CVector>& qubit_pauli_eigenstates() {
  static const std::vector<CVector> states = [] {
    const double h = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    std::vector<CVector> out(6, CVector(2));
    out[0] << 1.0, 0.0;
    out[1] << 0.0, 1.0;
    out[2] << h, h;
    out[3] << h, -h;
    out[4] << h, h * i;
    out[5] << h, -h * i;
    return out;
  }();
  return states;
}

const std::vector<std::string>& qubit_pauli_eigenstate_labels() {
  static const std::vector<std::string> labels{"0", "1", "+", "-", "+i", "-i"};
  return labels;
}

ExperimentDesign qpt_design(const OperatorBasis& choi_basis, std::size_t prep, std::size_t meas,
                            unsigned n_meas) {
  check_n_meas(n_meas);
  if (choi_basis.dim() != 4) throw DimensionMismatch("qubit process designs need a 4 x 4 operator basis");
  const auto& states = qubit_pauli_eigenstates();
  const auto& labels = qubit_pauli_eigenstate_labels();
  if (prep >= states.size() || meas >= states.size()) throw InvalidArgument("unknown Pauli eigenstate index");
  const ProcessEffect effect =
      process_effect(DensityOperator::pure(states[prep]), Effect::projector(states[meas]));
  return make_design(effect, choi_basis, n_meas, labels[prep] + ">" + labels[meas]);
}

ExperimentDesign random_qpt_design(const OperatorBasis& choi_basis, unsigned n_meas, RngStream& rng) {
  const std::size_t prep = uniform_index(6, rng);
  const std::size_t meas = uniform_index(6, rng);
  return qpt_design(choi_basis, prep, meas, n_meas);
}

std::vector<double> adaptive_scores(const std::vector<ExperimentDesign>& proposals, const RMatrix& cov) {
  std::vector<double> scores;
  scores.reserve(proposals.size());
  for (const auto& p : proposals) {
    const RVector& x = p.effect.coords;
    if (x.size() != cov.rows()) throw DimensionMismatch("proposal does not match the covariance");
    scores.push_back(x.dot(cov * x));
  }
  return scores;
}

std::size_t adaptive_choice(const std::vector<ExperimentDesign>& proposals, const RMatrix& cov) {
  if (proposals.empty()) throw InvalidArgument("adaptive design needs at least one proposal");
  const std::vector<double> scores = adaptive_scores(proposals, cov);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

ExperimentDesign adaptive_design(const std::vector<ExperimentDesign>& proposals,
                                 const PosteriorSummary& summary) {
  return proposals[adaptive_choice(proposals, summary.covariance)];
}

std::size_t scheduled_choice(const std::vector<double>& fractions, RngStream& rng) {
  if (fractions.empty()) throw InvalidArgument("schedule needs at least one fraction");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw InvalidArgument("schedule fractions must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("schedule fractions must sum to 1");
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    acc += fractions[i];
    if (u < acc) return i;
  }
  // u landed in the rounding gap above the last partial sum.
  for (std::size_t i = fractions.size(); i-- > 0;) {
    if (fractions[i] > 0.0) return i;
  }
  return 0;
}

namespace {

class RandomPauli : public DesignHeuristic {
 public:
  RandomPauli(BasisPtr basis, unsigned n_meas) : basis_(std::move(basis)), n_meas_(n_meas) {}
  HeuristicKind kind() const override { return HeuristicKind::random_pauli; }
  ExperimentDesign next(std::size_t, const SmcUpdater&, RngStream& rng) override {
    return random_pauli_design(*basis_, n_meas_, rng);
  }

 private:
  BasisPtr basis_;
  unsigned n_meas_;
};

class RandomStabilizerQutrit : public DesignHeuristic {
 public:
  RandomStabilizerQutrit(BasisPtr basis, unsigned n_meas) : basis_(std::move(basis)), n_meas_(n_meas) {}
  HeuristicKind kind() const override { return HeuristicKind::random_stabilizer_qutrit; }
  ExperimentDesign next(std::size_t, const SmcUpdater&, RngStream& rng) override {
    return random_stabilizer_qutrit_design(*basis_, n_meas_, rng);
  }

 private:
  BasisPtr basis_;
  unsigned n_meas_;
};

class RandomQpt : public DesignHeuristic {
 public:
  RandomQpt(BasisPtr basis, unsigned n_meas) : basis_(std::move(basis)), n_meas_(n_meas) {}
  HeuristicKind kind() const override { return HeuristicKind::random_qpt; }
  ExperimentDesign next(std::size_t, const SmcUpdater&, RngStream& rng) override {
    return random_qpt_design(*basis_, n_meas_, rng);
  }

 private:
  BasisPtr basis_;
  unsigned n_meas_;
};

class AdaptiveQpt : public DesignHeuristic {
 public:
  AdaptiveQpt(BasisPtr basis, unsigned n_meas, std::size_t n_proposals)
      : basis_(std::move(basis)), n_meas_(n_meas), n_proposals_(n_proposals) {
    if (n_proposals_ < 1) throw InvalidArgument("adaptive design needs n_proposals >= 1");
  }
  HeuristicKind kind() const override { return HeuristicKind::adaptive_overlap; }
  ExperimentDesign next(std::size_t, const SmcUpdater& updater, RngStream& rng) override {
    std::vector<ExperimentDesign> proposals;
    proposals.reserve(n_proposals_);
    for (std::size_t i = 0; i < n_proposals_; ++i) proposals.push_back(random_qpt_design(*basis_, n_meas_, rng));
    return proposals[adaptive_choice(proposals, updater.covariance())];
  }

 private:
  BasisPtr basis_;
  unsigned n_meas_;
  std::size_t n_proposals_;
};

class ScheduledMix : public DesignHeuristic {
 public:
  ScheduledMix(std::vector<HeuristicPtr> parts, std::vector<double> fractions)
      : parts_(std::move(parts)), fractions_(std::move(fractions)) {
    if (parts_.empty() || parts_.size() != fractions_.size()) {
      throw InvalidArgument("scheduled mix needs one fraction per heuristic");
    }
  }
  HeuristicKind kind() const override { return HeuristicKind::scheduled_mix; }
  ExperimentDesign next(std::size_t step, const SmcUpdater& updater, RngStream& rng) override {
    return parts_[scheduled_choice(fractions_, rng)]->next(step, updater, rng);
  }

 private:
  std::vector<HeuristicPtr> parts_;
  std::vector<double> fractions_;
};

class Coin : public DesignHeuristic {
 public:
  explicit Coin(unsigned n_meas) : n_meas_(n_meas) {}
  HeuristicKind kind() const override { return HeuristicKind::coin; }
  ExperimentDesign next(std::size_t, const SmcUpdater&, RngStream&) override { return coin_design(n_meas_); }

 private:
  unsigned n_meas_;
};

}  // namespace

HeuristicPtr make_random_pauli(BasisPtr basis, unsigned n_meas) {
  check_n_meas(n_meas);
  return std::make_unique<RandomPauli>(std::move(basis), n_meas);
}

HeuristicPtr make_random_stabilizer_qutrit(BasisPtr basis, unsigned n_meas) {
  check_n_meas(n_meas);
  return std::make_unique<RandomStabilizerQutrit>(std::move(basis), n_meas);
}

HeuristicPtr make_random_qpt(BasisPtr choi_basis, unsigned n_meas) {
  check_n_meas(n_meas);
  return std::make_unique<RandomQpt>(std::move(choi_basis), n_meas);
}

HeuristicPtr make_adaptive_qpt(BasisPtr choi_basis, unsigned n_meas, std::size_t n_proposals) {
  check_n_meas(n_meas);
  return std::make_unique<AdaptiveQpt>(std::move(choi_basis), n_meas, n_proposals);
}

HeuristicPtr make_scheduled_mix(std::vector<HeuristicPtr> parts, std::vector<double> fractions) {
  return std::make_unique<ScheduledMix>(std::move(parts), std::move(fractions));
}

HeuristicPtr make_coin_heuristic(unsigned n_meas) {
  check_n_meas(n_meas);
  return std::make_unique<Coin>(n_meas);
}

}  // namespace tomolab
