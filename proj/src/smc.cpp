#include "tomolab/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tomolab/errors.hpp"
#include "tomolab/kernels.hpp"
#include "tomolab/parallel.hpp"

namespace tomolab {

namespace {

constexpr double kOffSupportTol = 1e-9;

struct Factored {
  RMatrix vectors;  // d x r
  RVector values;   // r, positive
};

// Eigenpairs of a symmetric PSD matrix above the relative cutoff.
Factored factor_support(const RMatrix& cov) {
  Eigen::SelfAdjointEigenSolver<RMatrix> es(cov);
  const RVector& ev = es.eigenvalues();
  const double top = ev.size() > 0 ? std::max(ev.maxCoeff(), 0.0) : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    if (top > 0.0 && ev[j] > kPseudoInverseCutoff * top) keep.push_back(j);
  }
  Factored f{RMatrix(cov.rows(), static_cast<Eigen::Index>(keep.size())),
             RVector(static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t c = 0; c < keep.size(); ++c) {
    f.vectors.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
    f.values[static_cast<Eigen::Index>(c)] = ev[keep[c]];
  }
  return f;
}

std::span<const double> flat(const RowMatrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace

ParticleCloud init_cloud(const ParticleSampler& sampler, const StateSpace& space, std::size_t n,
                         RngStream& rng) {
  if (n < 2) throw InvalidArgument("a particle cloud needs at least two particles");
  const std::size_t d = space.n_params();
  ParticleCloud cloud;
  cloud.locations.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  cloud.weights = RVector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  cloud.basis_id = space.basis_id();
  const RngStream root = rng.split(rng());
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      RngStream r = root.split(i);
      const RVector x = sampler(r);
      if (static_cast<std::size_t>(x.size()) != d) throw DimensionMismatch("prior draw has the wrong length");
      auto row = cloud.row(i);
      std::copy(x.data(), x.data() + d, row.begin());
      space.project(row);
    }
  }, 64);
  return cloud;
}

ParticleCloud init_cloud(const PriorDistribution& prior, const StateSpace& space, std::size_t n,
                         RngStream& rng) {
  if (prior.basis()->name() != space.basis_id()) {
    throw DimensionMismatch("prior basis " + prior.basis()->name() + " does not match space basis " +
                            space.basis_id());
  }
  return init_cloud([&prior](RngStream& r) { return prior.sample(r); }, space, n, rng);
}

ParticleCloud cloud_from_locations(RowMatrix locations, std::string basis_id) {
  if (locations.rows() < 1) throw InvalidArgument("empty particle cloud");
  ParticleCloud cloud;
  const auto n = locations.rows();
  cloud.locations = std::move(locations);
  cloud.weights = RVector::Constant(n, 1.0 / static_cast<double>(n));
  cloud.basis_id = std::move(basis_id);
  return cloud;
}

double bayes_update(ParticleCloud& cloud, const Datum& datum, const Model& model) {
  if (cloud.basis_id != model.space().basis_id()) throw DimensionMismatch("cloud and model bases differ");
  const std::size_t n = cloud.size();
  RVector like(static_cast<Eigen::Index>(n));
  model.likelihoods(flat(cloud.locations), datum, {like.data(), n});
  RVector updated = cloud.weights;
  const double total = kernels::multiply_sum({updated.data(), n}, {like.data(), n});
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateUpdate("every particle assigns zero likelihood to the datum");
  }
  kernels::scale({updated.data(), n}, 1.0 / total);
  cloud.weights = std::move(updated);
  return std::log(total);
}

double effective_sample_size(const ParticleCloud& cloud) {
  return 1.0 / kernels::sum_squares({cloud.weights.data(), cloud.size()});
}

RVector posterior_mean(const ParticleCloud& cloud) {
  RVector mean(static_cast<Eigen::Index>(cloud.dim()));
  kernels::weighted_row_sum(flat(cloud.locations), cloud.dim(), {cloud.weights.data(), cloud.size()},
                            {mean.data(), cloud.dim()});
  return mean;
}

RMatrix posterior_covariance(const ParticleCloud& cloud, std::size_t fixed_leading) {
  const RVector mean = posterior_mean(cloud);
  const RowMatrix centered = cloud.locations.rowwise() - mean.transpose();
  RMatrix cov = centered.transpose() * (cloud.weights.asDiagonal() * centered);
  cov = 0.5 * (cov + cov.transpose()).eval();
  const auto k = static_cast<Eigen::Index>(std::min(fixed_leading, cloud.dim()));
  if (k > 0) {
    cov.topRows(k).setZero();
    cov.leftCols(k).setZero();
  }
  return cov;
}

PosteriorSummary summarize(const ParticleCloud& cloud, std::size_t fixed_leading, double total_log_norm) {
  return PosteriorSummary{VectorizedOperator{posterior_mean(cloud), cloud.basis_id},
                          posterior_covariance(cloud, fixed_leading), effective_sample_size(cloud),
                          total_log_norm};
}

ParticleCloud resample(const ParticleCloud& cloud, double a, const StateSpace& space, RngStream& rng) {
  if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("Liu-West parameter must satisfy 0 < a <= 1");
  const std::size_t n = cloud.size();
  const std::size_t d = cloud.dim();
  const RVector mean = posterior_mean(cloud);
  Factored noise = factor_support(posterior_covariance(cloud, space.first_free()));
  const RMatrix factor = noise.vectors * (noise.values * (1.0 - a * a)).cwiseSqrt().asDiagonal();
  const auto rank = factor.cols();

  std::vector<std::size_t> parents(n);
  std::discrete_distribution<std::size_t> pick(cloud.weights.data(), cloud.weights.data() + n);
  for (auto& p : parents) p = pick(rng);

  ParticleCloud out;
  out.locations.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  out.weights = RVector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  out.basis_id = cloud.basis_id;
  if (cloud.tracked()) out.etas.resize(static_cast<Eigen::Index>(n));

  const RngStream root = rng.split(rng());
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    RVector z(rank);
    RVector x(static_cast<Eigen::Index>(d));
    for (std::size_t i = begin; i < end; ++i) {
      RngStream r = root.split(i);
      std::normal_distribution<double> normal;
      const auto parent = cloud.locations.row(static_cast<Eigen::Index>(parents[i]));
      x = a * parent.transpose() + (1.0 - a) * mean;
      if (rank > 0 && a < 1.0) {
        for (Eigen::Index j = 0; j < rank; ++j) z[j] = normal(r);
        x += factor * z;
      }
      auto row = out.row(i);
      std::copy(x.data(), x.data() + d, row.begin());
      try {
        space.project(row);
      } catch (const DegenerateProjection&) {
        std::copy(parent.data(), parent.data() + d, row.begin());
      }
      if (cloud.tracked()) out.etas[static_cast<Eigen::Index>(i)] = cloud.etas[static_cast<Eigen::Index>(parents[i])];
    }
  }, 64);
  return out;
}

CredibleEllipsoid::CredibleEllipsoid(VectorizedOperator center, RMatrix covariance, double z)
    : center_(std::move(center)), covariance_(std::move(covariance)), z_(z) {
  if (!(z > 0.0)) throw InvalidArgument("ellipsoid scale must be positive");
  if (covariance_.rows() != center_.coords.size() || covariance_.cols() != center_.coords.size()) {
    throw DimensionMismatch("covariance does not match the center");
  }
  Factored f = factor_support(covariance_);
  support_ = std::move(f.vectors);
  inv_eigen_ = f.values.cwiseInverse();
}

double CredibleEllipsoid::mahalanobis_squared(const RVector& x) const {
  if (x.size() != center_.coords.size()) throw DimensionMismatch("point has the wrong length");
  const RVector r = x - center_.coords;
  const RVector p = support_.transpose() * r;
  if ((r - support_ * p).norm() > kOffSupportTol) return std::numeric_limits<double>::infinity();
  return p.cwiseAbs2().dot(inv_eigen_);
}

bool CredibleEllipsoid::contains(const RVector& x) const { return mahalanobis_squared(x) <= z_ * z_; }

CredibleEllipsoid credible_ellipsoid(const ParticleCloud& cloud, double z, std::size_t fixed_leading) {
  return CredibleEllipsoid(VectorizedOperator{posterior_mean(cloud), cloud.basis_id},
                           posterior_covariance(cloud, fixed_leading), z);
}

double predictive_variance(const ParticleCloud& cloud, const OperatorBasis& basis,
                           const VectorizedOperator& observable) {
  if (observable.basis_id != cloud.basis_id || basis.name() != cloud.basis_id) {
    throw DimensionMismatch("observable, basis and cloud must share a basis");
  }
  const RVector& x = observable.coords;
  const CMatrix obs = basis.matrix(x);
  const RVector x2 = basis.coords(obs * obs);
  const RMatrix cov = posterior_covariance(cloud);
  const RVector mean = posterior_mean(cloud);

  // Between hypotheses: Var_rho[Tr(X rho)] = x^T cov x.
  const double between = x.dot(cov * x);
  // Within: E_rho[Tr(X^2 rho) - Tr(X rho)^2].
  std::vector<double> ex(cloud.size());
  kernels::dot_rows({cloud.locations.data(), static_cast<std::size_t>(cloud.locations.size())}, cloud.dim(),
                    {x.data(), static_cast<std::size_t>(x.size())}, ex);
  double second_moment = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) second_moment += cloud.weights(i) * ex[i] * ex[i];
  const double within = x2.dot(mean) - second_moment;
  return between + within;
}

std::vector<PrincipalComponent> principal_components(const PosteriorSummary& summary, std::size_t k) {
  const auto d = static_cast<std::size_t>(summary.covariance.rows());
  if (k > d) throw InvalidArgument("more principal components requested than dimensions");
  Eigen::SelfAdjointEigenSolver<RMatrix> es(summary.covariance);
  std::vector<PrincipalComponent> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = static_cast<Eigen::Index>(d - 1 - j);
    out.push_back({es.eigenvalues()[col],
                   VectorizedOperator{es.eigenvectors().col(col), summary.mean.basis_id}});
  }
  return out;
}

SmcUpdater::SmcUpdater(ModelPtr model, ParticleCloud cloud, SmcOptions options, RngStream rng)
    : model_(std::move(model)), cloud_(std::move(cloud)), options_(options), rng_(rng) {
  if (!model_) throw InvalidArgument("updater needs a model");
  if (cloud_.basis_id != model_->space().basis_id()) throw DimensionMismatch("cloud and model bases differ");
  if (!(options_.resample_threshold >= 0.0 && options_.resample_threshold <= 1.0)) {
    throw InvalidArgument("resample threshold must lie in [0, 1]");
  }
}

double SmcUpdater::update(const Datum& datum) {
  const double log_norm = bayes_update(cloud_, datum, *model_);
  total_log_norm_ += log_norm;
  if (effective_sample_size(cloud_) < options_.resample_threshold * static_cast<double>(cloud_.size())) {
    cloud_ = resample(cloud_, options_.liu_west_a, model_->space(), rng_);
    ++n_resamples_;
  }
  return log_norm;
}

RMatrix SmcUpdater::covariance() const { return posterior_covariance(cloud_, model_->space().first_free()); }

PosteriorSummary SmcUpdater::summary() const {
  return summarize(cloud_, model_->space().first_free(), total_log_norm_);
}

}  // namespace tomolab
