#pragma once

// Prior distributions over states and channels, represented only through a
// sampler: SMC never needs a density, only draws.
//
// Fiducial priors have the maximally mixed state (or the completely
// depolarizing channel) as their mean. Insightful priors are obtained from a
// fiducial prior by pushing every draw through a generalized amplitude damping
// (GAD) channel
//
//     rho -> (1 - eps) rho + eps rho_star,   eps ~ Beta(alpha, beta),
//
// with (alpha, beta, rho_star) chosen so the mean lands on a requested rho_mu
// while E[eps] is as small as possible.

#include <functional>
#include <optional>
#include <string>

#include "tomolab/linalg.hpp"
#include "tomolab/qobj.hpp"
#include "tomolab/rng.hpp"

namespace tomolab {

enum class PriorKind { fiducial, insightful };

/// Means with a smaller minimum eigenvalue are rejected (beta would be ~0).
inline constexpr double kLambdaFloor = 1e-6;

class PriorDistribution {
 public:
  using Sampler = std::function<RVector(RngStream&)>;

  /// `channel_dim` is set when samples are Choi states of channels on C^D.
  PriorDistribution(BasisPtr basis, PriorKind kind, std::string description, Sampler sampler,
                    std::optional<std::size_t> channel_dim = std::nullopt);

  RVector sample(RngStream& rng) const { return sampler_(rng); }

  const BasisPtr& basis() const { return basis_; }
  std::size_t dim() const { return basis_->dim(); }
  std::size_t n_params() const { return basis_->size(); }
  PriorKind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  bool is_channel() const { return channel_dim_.has_value(); }
  std::optional<std::size_t> channel_dim() const { return channel_dim_; }

 private:
  BasisPtr basis_;
  PriorKind kind_;
  std::string description_;
  Sampler sampler_;
  std::optional<std::size_t> channel_dim_;
};

PriorDistribution ginibre_prior(BasisPtr basis, std::size_t rank);
PriorDistribution bures_prior(BasisPtr basis);
/// Real-Ginibre qubit prior; `basis` must be the single-qubit Pauli basis.
PriorDistribution rebit_prior(BasisPtr basis, std::size_t rank = 2);
/// BCSZ channels on C^D; `basis` is a basis for D^2 x D^2 operators.
PriorDistribution bcsz_prior(BasisPtr basis, std::size_t channel_dim, std::size_t kraus_rank);

struct GadParams {
  double alpha = 1.0;
  double beta = 0.0;
  double lambda_min = 0.0;
  CMatrix rho_star;
  /// rho_mu is maximally mixed: beta diverges and the fiducial prior is used as is.
  bool passthrough = false;
};

/// alpha = 1, beta = D l/(1 - D l), rho* = ((alpha+beta)/alpha)(rho_mu - beta/(alpha+beta) 1/D),
/// with D the matrix dimension of `rho_mu` and l its minimum eigenvalue.
/// Throws InvalidArgument if l <= kLambdaFloor.
GadParams gad_params(const CMatrix& rho_mu);

struct GadPrior {
  PriorDistribution fiducial;
  CMatrix rho_mu;
  CMatrix rho_star;
  RVector rho_star_coords;
  double alpha = 1.0;
  double beta = 0.0;
  double lambda_min = 0.0;
  bool passthrough = false;
};

/// Builds the GAD prior for `rho_mu` over `fiducial`. For channel priors `rho_mu`
/// is a Choi state J/D and rho* is checked for trace preservation (1e-6).
GadPrior make_gad_prior(PriorDistribution fiducial, const CMatrix& rho_mu);

/// (1 - eps) x_f + eps x_star with x_f a fiducial draw and eps ~ Beta(1, beta).
RVector gad_sample(const GadPrior& prior, RngStream& rng);

/// Sample an eps from Beta(1, beta) by inversion: 1 - u^{1/beta}.
double sample_beta_one(double beta, RngStream& rng);

/// Wraps a GadPrior as a PriorDistribution (returns `fiducial` when rho_mu is maximally mixed).
PriorDistribution insightful_prior(PriorDistribution fiducial, const CMatrix& rho_mu);

struct CoinPrior {
  double p_mu = 0.5;
  double p_star = 0.5;
  double alpha = 1.0;
  double beta = 0.0;
  bool passthrough = true;
};

/// alpha = 1, beta = 2l/(1-2l) with l = min(p_mu, 1 - p_mu), and the matching p*.
/// Throws InvalidArgument unless 0 < p_mu < 1.
CoinPrior coin_gad_params(double p_mu);

/// (1 - eps) p + eps p* with p ~ Uniform(0, 1).
double coin_gad_sample(const CoinPrior& prior, RngStream& rng);

}  // namespace tomolab
