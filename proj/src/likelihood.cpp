#include "tomolab/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "tomolab/errors.hpp"
#include "tomolab/kernels.hpp"
#include "tomolab/parallel.hpp"

namespace tomolab {

namespace {

constexpr double kProbabilitySlack = 1e-10;

void check_pair(const VectorizedOperator& a, const VectorizedOperator& b) {
  if (a.basis_id != b.basis_id) {
    throw DimensionMismatch("operands are in different bases: " + a.basis_id + " vs " + b.basis_id);
  }
  if (a.coords.size() != b.coords.size()) throw DimensionMismatch("coordinate lengths differ");
}

double raw_probability(const VectorizedOperator& state, const VectorizedOperator& effect) {
  check_pair(state, effect);
  return state.coords.dot(effect.coords);
}

double log_pmf(unsigned n, unsigned k, double p) {
  const double q = std::clamp(1.0 - p, kProbabilityFloor, 1.0);
  p = std::clamp(p, kProbabilityFloor, 1.0);
  double v = log_binomial_coefficient(n, k);
  if (k > 0) v += k * std::log(p);
  if (n > k) v += (n - k) * std::log(q);
  return v;
}

}  // namespace

ExperimentDesign make_design(const Effect& effect, const OperatorBasis& basis, unsigned n_meas,
                             std::string label, double time) {
  if (n_meas < 1) throw InvalidArgument("n_meas must be at least 1");
  return ExperimentDesign{vectorize(effect.matrix(), basis), n_meas, time, std::move(label)};
}

ExperimentDesign make_design(const ProcessEffect& effect, const OperatorBasis& choi_basis,
                             unsigned n_meas, std::string label, double time) {
  if (n_meas < 1) throw InvalidArgument("n_meas must be at least 1");
  return ExperimentDesign{vectorize(effect.matrix(), choi_basis), n_meas, time, std::move(label)};
}

ExperimentDesign coin_design(unsigned n_meas, double time) {
  if (n_meas < 1) throw InvalidArgument("n_meas must be at least 1");
  RVector e(1);
  e[0] = 1.0;
  return ExperimentDesign{VectorizedOperator{e, "coin"}, n_meas, time, "heads"};
}

double born_probability(const VectorizedOperator& state, const VectorizedOperator& effect) {
  const double p = raw_probability(state, effect);
  if (p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack) {
    std::ostringstream os;
    os << "Born probability " << p << " lies outside [0, 1]";
    throw InvalidArgument(os.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

double sequence_log_likelihood(const VectorizedOperator& state,
                               const std::vector<VectorizedOperator>& effects,
                               const std::vector<unsigned>& counts) {
  if (effects.size() != counts.size()) throw DimensionMismatch("one count per effect expected");
  double total = 0.0;
  for (std::size_t k = 0; k < effects.size(); ++k) {
    if (counts[k] == 0) continue;
    const double p = born_probability(state, effects[k]);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    total += counts[k] * std::log(p);
  }
  return total;
}

double log_binomial_coefficient(unsigned n, unsigned k) {
  if (k > n) throw InvalidArgument("binomial coefficient with k > n");
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial_pmf(unsigned n, unsigned k, double p) { return std::exp(log_pmf(n, k, p)); }

double binomial_likelihood(const VectorizedOperator& state, const ExperimentDesign& design,
                           unsigned n_success) {
  if (n_success > design.n_meas) throw InvalidArgument("n_success exceeds n_meas");
  return binomial_pmf(design.n_meas, n_success, born_probability(state, design.effect));
}

Datum simulate_experiment(const VectorizedOperator& true_state, const ExperimentDesign& design,
                          RngStream& rng) {
  const double p = born_probability(true_state, design.effect);
  unsigned k;
  if (p <= 0.0) {
    k = 0;
  } else if (p >= 1.0) {
    k = design.n_meas;
  } else {
    std::binomial_distribution<unsigned> draw(design.n_meas, p);
    k = draw(rng);
  }
  return Datum{k, design};
}

double process_likelihood(const VectorizedOperator& choi, const OperatorBasis& choi_basis,
                          const DensityOperator& prep, const Effect& meas, unsigned n_meas,
                          unsigned n_success) {
  const ExperimentDesign design = make_design(process_effect(prep, meas), choi_basis, n_meas);
  return binomial_likelihood(choi, design, n_success);
}

Model::Model(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw InvalidArgument("model needs a state space");
}

void Model::outcome_probabilities(std::span<const double> locations, const ExperimentDesign& design,
                                  std::span<double> out) const {
  const std::size_t d = n_params();
  if (design.effect.basis_id != space_->basis_id()) {
    throw DimensionMismatch("design effect is in basis " + design.effect.basis_id + ", model uses " +
                            space_->basis_id());
  }
  if (static_cast<std::size_t>(design.effect.coords.size()) != d) {
    throw DimensionMismatch("design effect has the wrong length");
  }
  const std::span<const double> e(design.effect.coords.data(), d);
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    kernels::dot_rows(locations.subspan(begin * d, (end - begin) * d), d, e,
                      out.subspan(begin, end - begin));
    for (std::size_t i = begin; i < end; ++i) out[i] = std::clamp(out[i], 0.0, 1.0);
  });
}

void Model::likelihoods(std::span<const double> locations, const Datum& datum,
                        std::span<double> out) const {
  const unsigned n = datum.design.n_meas;
  const unsigned k = datum.n_success;
  if (k > n) throw InvalidArgument("n_success exceeds n_meas");
  outcome_probabilities(locations, datum.design, out);
  const double log_c = log_binomial_coefficient(n, k);
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double p = std::clamp(out[i], kProbabilityFloor, 1.0);
      const double q = std::clamp(1.0 - out[i], kProbabilityFloor, 1.0);
      double v = log_c;
      if (k > 0) v += k * std::log(p);
      if (n > k) v += (n - k) * std::log(q);
      out[i] = std::exp(v);
    }
  });
}

}  // namespace tomolab
