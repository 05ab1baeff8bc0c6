#pragma once

// Two-outcome measurement models. An experiment measures an effect E n_meas
// times and reports how often E fired; everything else (K-outcome POVMs,
// process tomography) is expressed through that one shape.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tomolab/linalg.hpp"
#include "tomolab/qobj.hpp"
#include "tomolab/rng.hpp"
#include "tomolab/state_space.hpp"

namespace tomolab {

/// Probabilities are clamped to [kProbabilityFloor, 1] before taking logs.
inline constexpr double kProbabilityFloor = 1e-300;

struct ExperimentDesign {
  VectorizedOperator effect;
  unsigned n_meas = 1;
  double time = 0.0;
  std::string label;
};

struct Datum {
  unsigned n_success = 0;
  ExperimentDesign design;
};

/// Validates `effect` as 0 <= E <= 1 and vectorizes it.
ExperimentDesign make_design(const Effect& effect, const OperatorBasis& basis, unsigned n_meas,
                             std::string label = {}, double time = 0.0);
/// Composite prep-and-measure design for Choi-state hypotheses.
ExperimentDesign make_design(const ProcessEffect& effect, const OperatorBasis& choi_basis,
                             unsigned n_meas, std::string label = {}, double time = 0.0);
/// Heads-count design for the coin model (effect coordinate is 1).
ExperimentDesign coin_design(unsigned n_meas, double time = 0.0);

/// <x_state, x_effect>, clamped to [0, 1]. Throws DimensionMismatch on basis or
/// length mismatch, InvalidArgument if the value is outside [0, 1] by more than 1e-10.
double born_probability(const VectorizedOperator& state, const VectorizedOperator& effect);

/// sum_k n_k log Tr(E_k rho); -inf if some Tr(E_k rho) = 0 with n_k > 0.
double sequence_log_likelihood(const VectorizedOperator& state,
                               const std::vector<VectorizedOperator>& effects,
                               const std::vector<unsigned>& counts);

double log_binomial_coefficient(unsigned n, unsigned k);

/// C(n, k) p^k (1-p)^(n-k) with p and 1-p clamped to [kProbabilityFloor, 1].
double binomial_pmf(unsigned n, unsigned k, double p);

/// Throws InvalidArgument unless 0 <= n_success <= design.n_meas.
double binomial_likelihood(const VectorizedOperator& state, const ExperimentDesign& design,
                           unsigned n_success);

/// n_success ~ Binomial(n_meas, born_probability(state, effect)).
Datum simulate_experiment(const VectorizedOperator& true_state, const ExperimentDesign& design,
                          RngStream& rng);

/// binomial_likelihood on the Choi state with effect process_effect(prep, meas).
double process_likelihood(const VectorizedOperator& choi, const OperatorBasis& choi_basis,
                          const DensityOperator& prep, const Effect& meas, unsigned n_meas,
                          unsigned n_success);

/// Born-rule model over a state space: Pr(E | x) = <x, e>.
class Model {
 public:
  explicit Model(SpacePtr space);
  const StateSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t n_params() const { return space_->n_params(); }

  /// Pr(E | x_i) for every row of `locations` (n x d, row-major), clamped to [0, 1].
  void outcome_probabilities(std::span<const double> locations, const ExperimentDesign& design,
                             std::span<double> out) const;
  /// Binomial likelihood of `datum` for every row, written to `out`.
  void likelihoods(std::span<const double> locations, const Datum& datum, std::span<double> out) const;

 private:
  SpacePtr space_;
};

using ModelPtr = std::shared_ptr<const Model>;

}  // namespace tomolab
