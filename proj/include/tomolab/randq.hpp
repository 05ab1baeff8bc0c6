#pragma once

// Samplers for the default (fiducial) ensembles over states and channels.
// Every sampler is a pure function of its arguments and the RngStream state.

#include <cstddef>

#include "tomolab/linalg.hpp"
#include "tomolab/qobj.hpp"
#include "tomolab/rng.hpp"

namespace tomolab {

struct GinibreSpec {
  std::size_t dim = 2;
  std::size_t rank = 2;
  bool real_valued = false;

  /// Throws InvalidArgument unless 1 <= rank <= dim.
  void validate() const;
};

/// D x K matrix with i.i.d. N(0,1) + i N(0,1) entries (imaginary part zero if real_valued).
CMatrix ginibre_matrix(std::size_t dim, std::size_t k, RngStream& rng, bool real_valued = false);

/// Haar-random unitary: QR of a Ginibre matrix with the diagonal phases of R removed.
CMatrix haar_unitary(std::size_t dim, RngStream& rng);

/// AA^dagger / Tr(AA^dagger), A ~ Ginibre(D, K).
DensityOperator ginibre_state(std::size_t dim, std::size_t rank, RngStream& rng);
DensityOperator ginibre_state(const GinibreSpec& spec, RngStream& rng);

/// (1+U)AA^dagger(1+U^dagger) / Tr(...), U Haar, A ~ Ginibre(D, D).
DensityOperator bures_state(std::size_t dim, RngStream& rng);

/// Real-Ginibre qubit state (rebit); its Pauli-Y coordinate is zero.
DensityOperator ginibre_rebit_state(std::size_t rank, RngStream& rng);

inline constexpr double kBcszEigenFloor = 1e-12;
inline constexpr int kBcszMaxRetries = 100;

/// BCSZ random channel of Kraus rank K, returned as its Choi state J/D.
/// Throws InvalidOperator if Tr_out(XX^dagger) stays singular for 100 retries.
ChoiState bcsz_channel(std::size_t dim, std::size_t kraus_rank, RngStream& rng);

}  // namespace tomolab
