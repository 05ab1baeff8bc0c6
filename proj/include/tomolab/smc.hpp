#pragma once

// Sequential Monte Carlo over coordinate vectors: a weighted particle cloud,
// Bayes reweighting, Liu-West resampling and posterior summaries.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "tomolab/likelihood.hpp"
#include "tomolab/linalg.hpp"
#include "tomolab/priors.hpp"
#include "tomolab/qobj.hpp"
#include "tomolab/rng.hpp"
#include "tomolab/state_space.hpp"

namespace tomolab {

struct ParticleCloud {
  RowMatrix locations;  // n x d, one hypothesis per row
  RVector weights;      // sums to 1
  RVector etas;         // per-particle diffusion rate; empty unless tracking
  std::string basis_id;

  std::size_t size() const { return static_cast<std::size_t>(locations.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(locations.cols()); }
  bool tracked() const { return etas.size() > 0; }
  std::span<const double> row(std::size_t i) const { return {locations.row(i).data(), dim()}; }
  std::span<double> row(std::size_t i) { return {locations.row(i).data(), dim()}; }
};

using ParticleSampler = std::function<RVector(RngStream&)>;

/// n draws from `sampler`, particle i using its own child stream, each projected
/// onto `space`; uniform weights. Advances `rng` by one draw.
ParticleCloud init_cloud(const ParticleSampler& sampler, const StateSpace& space, std::size_t n,
                         RngStream& rng);
ParticleCloud init_cloud(const PriorDistribution& prior, const StateSpace& space, std::size_t n,
                         RngStream& rng);
/// Cloud with fixed locations and uniform weights.
ParticleCloud cloud_from_locations(RowMatrix locations, std::string basis_id);

/// w_i <- w_i L_i / sum_j w_j L_j. Returns log sum_j w_j L_j. Throws
/// DegenerateUpdate, leaving the cloud untouched, if that sum is zero.
double bayes_update(ParticleCloud& cloud, const Datum& datum, const Model& model);

double effective_sample_size(const ParticleCloud& cloud);

/// Liu-West resampling: parents drawn in proportion to weight, moved to
/// a x_parent + (1 - a) mean plus N(0, (1 - a^2) cov) noise restricted to the
/// column space of the covariance, projected onto `space`, weights reset.
/// Tracked clouds copy eta from the parent unchanged.
ParticleCloud resample(const ParticleCloud& cloud, double a, const StateSpace& space, RngStream& rng);

RVector posterior_mean(const ParticleCloud& cloud);
/// sum_i w_i (x_i - mean)(x_i - mean)^T; the first `fixed_leading` rows and
/// columns are set to zero (coordinates pinned by normalization).
RMatrix posterior_covariance(const ParticleCloud& cloud, std::size_t fixed_leading = 0);

struct PosteriorSummary {
  VectorizedOperator mean;
  RMatrix covariance;
  double ess = 0.0;
  double total_log_norm = 0.0;
};

PosteriorSummary summarize(const ParticleCloud& cloud, std::size_t fixed_leading = 0,
                           double total_log_norm = 0.0);

/// Eigenvalues below this fraction of the largest are treated as zero.
inline constexpr double kPseudoInverseCutoff = 1e-12;

class CredibleEllipsoid {
 public:
  CredibleEllipsoid(VectorizedOperator center, RMatrix covariance, double z);
  const VectorizedOperator& center() const { return center_; }
  const RMatrix& covariance() const { return covariance_; }
  double z() const { return z_; }
  std::size_t rank() const { return static_cast<std::size_t>(support_.cols()); }
  /// (x - c)^T cov^+ (x - c), or +inf if x - c leaves the support of cov.
  double mahalanobis_squared(const RVector& x) const;
  bool contains(const RVector& x) const;

 private:
  VectorizedOperator center_;
  RMatrix covariance_;
  double z_;
  RMatrix support_;    // orthonormal columns spanning the covariance range
  RVector inv_eigen_;  // reciprocal eigenvalues on that range
};

CredibleEllipsoid credible_ellipsoid(const ParticleCloud& cloud, double z, std::size_t fixed_leading = 0);

/// Predictive variance of measuring X, by the law of total variance:
/// x^T cov x (spread of Tr(X rho) across hypotheses) plus E[Tr(X^2 rho) - Tr(X rho)^2].
/// The total equals Tr(X^2 rho_hat) - Tr(X rho_hat)^2.
double predictive_variance(const ParticleCloud& cloud, const OperatorBasis& basis,
                           const VectorizedOperator& observable);

struct PrincipalComponent {
  double variance;
  VectorizedOperator direction;  // unit norm
};

/// Top-k eigenpairs of the covariance, variance descending.
std::vector<PrincipalComponent> principal_components(const PosteriorSummary& summary, std::size_t k);

struct SmcOptions {
  /// Resample when ess < resample_threshold * n.
  double resample_threshold = 0.5;
  double liu_west_a = 0.98;
};

/// Owns a cloud and runs the update / resample cycle.
class SmcUpdater {
 public:
  SmcUpdater(ModelPtr model, ParticleCloud cloud, SmcOptions options, RngStream rng);

  /// Bayes update followed by resampling if the ESS dropped below threshold.
  /// Returns the update's log normalization.
  double update(const Datum& datum);

  const ParticleCloud& cloud() const { return cloud_; }
  ParticleCloud& cloud() { return cloud_; }
  const Model& model() const { return *model_; }
  RngStream& rng() { return rng_; }
  const SmcOptions& options() const { return options_; }

  RVector mean() const { return posterior_mean(cloud_); }
  RMatrix covariance() const;
  PosteriorSummary summary() const;
  double ess() const { return effective_sample_size(cloud_); }
  double total_log_norm() const { return total_log_norm_; }
  std::size_t n_resamples() const { return n_resamples_; }

 private:
  ModelPtr model_;
  ParticleCloud cloud_;
  SmcOptions options_;
  RngStream rng_;
  double total_log_norm_ = 0.0;
  std::size_t n_resamples_ = 0;
};

}  // namespace tomolab
