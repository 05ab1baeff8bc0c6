#pragma once

// Experiment-design heuristics: which effect to measure next.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "tomolab/likelihood.hpp"
#include "tomolab/qobj.hpp"
#include "tomolab/rng.hpp"
#include "tomolab/smc.hpp"

namespace tomolab {

/// (1 + P)/2 for a uniformly drawn non-identity Pauli string P.
/// `basis` must be a Pauli basis (its elements are P / sqrt(2^n)).
ExperimentDesign random_pauli_design(const OperatorBasis& basis, unsigned n_meas, RngStream& rng);

/// The 12 single-qutrit stabilizer states: computational basis, then the three
/// bases (1, w^(a k^2 + b k)) / sqrt(3) for a = 0, 1, 2 with b indexing the state.
const std::vector<CVector>& qutrit_stabilizer_states();

/// Projector onto a uniformly drawn qutrit stabilizer state, vectorized in `basis`.
ExperimentDesign random_stabilizer_qutrit_design(const OperatorBasis& basis, unsigned n_meas,
                                                 RngStream& rng);

/// |0>, |1>, |+>, |->, |+i>, |-i>
const std::vector<CVector>& qubit_pauli_eigenstates();
const std::vector<std::string>& qubit_pauli_eigenstate_labels();

/// Process design for preparation `prep` and measurement projector `meas`
/// (indices into qubit_pauli_eigenstates()).
ExperimentDesign qpt_design(const OperatorBasis& choi_basis, std::size_t prep, std::size_t meas,
                            unsigned n_meas);

/// Uniform draw over the 36 preparation / measurement pairs.
ExperimentDesign random_qpt_design(const OperatorBasis& choi_basis, unsigned n_meas, RngStream& rng);

/// x^T cov x for each proposal's effect vector.
std::vector<double> adaptive_scores(const std::vector<ExperimentDesign>& proposals, const RMatrix& cov);

/// The proposal with the largest x^T cov x; ties go to the lowest index.
/// Throws InvalidArgument on an empty list.
std::size_t adaptive_choice(const std::vector<ExperimentDesign>& proposals, const RMatrix& cov);
ExperimentDesign adaptive_design(const std::vector<ExperimentDesign>& proposals,
                                 const PosteriorSummary& summary);

/// Index i with probability fractions[i]. Throws InvalidArgument unless the
/// fractions are nonnegative and sum to 1 (within 1e-9).
std::size_t scheduled_choice(const std::vector<double>& fractions, RngStream& rng);

enum class HeuristicKind { random_pauli, random_stabilizer_qutrit, random_qpt, adaptive_overlap, scheduled_mix, coin };

class DesignHeuristic {
 public:
  virtual ~DesignHeuristic() = default;
  virtual HeuristicKind kind() const = 0;
  virtual ExperimentDesign next(std::size_t step, const SmcUpdater& updater, RngStream& rng) = 0;
};

using HeuristicPtr = std::unique_ptr<DesignHeuristic>;

HeuristicPtr make_random_pauli(std::shared_ptr<const OperatorBasis> basis, unsigned n_meas);
HeuristicPtr make_random_stabilizer_qutrit(std::shared_ptr<const OperatorBasis> basis, unsigned n_meas);
HeuristicPtr make_random_qpt(std::shared_ptr<const OperatorBasis> choi_basis, unsigned n_meas);
/// Draws `n_proposals` random prep / measurement pairs and keeps the best.
HeuristicPtr make_adaptive_qpt(std::shared_ptr<const OperatorBasis> choi_basis, unsigned n_meas,
                               std::size_t n_proposals);
/// At each step picks one of `parts` with the given probabilities.
HeuristicPtr make_scheduled_mix(std::vector<HeuristicPtr> parts, std::vector<double> fractions);
HeuristicPtr make_coin_heuristic(unsigned n_meas);

}  // namespace tomolab
