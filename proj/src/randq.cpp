#include "tomolab/randq.hpp"

#include <cmath>
#include <random>

#include "tomolab/errors.hpp"

namespace tomolab {

void GinibreSpec::validate() const {
  if (dim < 1 || rank < 1 || rank > dim) {
    throw InvalidArgument("Ginibre rank must satisfy 1 <= K <= D (got D=" + std::to_string(dim) +
                          ", K=" + std::to_string(rank) + ")");
  }
}

CMatrix ginibre_matrix(std::size_t dim, std::size_t k, RngStream& rng, bool real_valued) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      const double re = normal(rng);
      const double im = real_valued ? 0.0 : normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

CMatrix haar_unitary(std::size_t dim, RngStream& rng) {
  const CMatrix z = ginibre_matrix(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  const CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  CVector phases(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    const double mag = std::abs(r(i, i));
    phases(i) = mag > 0.0 ? r(i, i) / mag : Complex(1.0, 0.0);
  }
  return q * phases.asDiagonal();
}

namespace {

DensityOperator normalized_gram(const CMatrix& a) {
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityOperator::from_matrix(std::move(rho));
}

}  // namespace

DensityOperator ginibre_state(std::size_t dim, std::size_t rank, RngStream& rng) {
  return ginibre_state(GinibreSpec{dim, rank, false}, rng);
}

DensityOperator ginibre_state(const GinibreSpec& spec, RngStream& rng) {
  spec.validate();
  return normalized_gram(ginibre_matrix(spec.dim, spec.rank, rng, spec.real_valued));
}

DensityOperator bures_state(std::size_t dim, RngStream& rng) {
  if (dim < 1) throw InvalidArgument("bures_state needs D >= 1");
  const CMatrix a = ginibre_matrix(dim, dim, rng);
  const CMatrix u = haar_unitary(dim, rng);
  const CMatrix lift = identity(dim) + u;
  return normalized_gram(lift * a);
}

DensityOperator ginibre_rebit_state(std::size_t rank, RngStream& rng) {
  if (rank < 1 || rank > 2) throw InvalidArgument("rebit rank must be 1 or 2");
  return ginibre_state(GinibreSpec{2, rank, true}, rng);
}

ChoiState bcsz_channel(std::size_t dim, std::size_t kraus_rank, RngStream& rng) {
  if (dim < 1 || kraus_rank < 1 || kraus_rank > dim * dim) {
    throw InvalidArgument("BCSZ Kraus rank must satisfy 1 <= K <= D^2");
  }
  for (int attempt = 0; attempt < kBcszMaxRetries; ++attempt) {
    const CMatrix x = ginibre_matrix(dim * dim, kraus_rank, rng);
    const CMatrix rho = x * x.adjoint();
    // Normalizing the input-side marginal (output factor traced out) makes
    // Tr_out J = 1, i.e. the sampled map is trace preserving.
    CMatrix choi;
    if (!restore_trace_preservation(rho, dim, kBcszEigenFloor, choi)) continue;
    return ChoiState::from_matrix(std::move(choi), dim);
  }
  throw InvalidOperator("bcsz_channel: partial trace stayed singular after retries");
}

}  // namespace tomolab
