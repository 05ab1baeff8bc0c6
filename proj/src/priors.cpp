#include "tomolab/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "tomolab/errors.hpp"
#include "tomolab/randq.hpp"

namespace tomolab {

PriorDistribution::PriorDistribution(BasisPtr basis, PriorKind kind, std::string description,
                                     Sampler sampler, std::optional<std::size_t> channel_dim)
    : basis_(std::move(basis)),
      kind_(kind),
      description_(std::move(description)),
      sampler_(std::move(sampler)),
      channel_dim_(channel_dim) {
  if (!basis_) throw InvalidArgument("prior needs a basis");
  if (channel_dim_ && (*channel_dim_) * (*channel_dim_) != basis_->dim()) {
    throw DimensionMismatch("channel prior basis must act on D^2 x D^2 operators");
  }
}

PriorDistribution ginibre_prior(BasisPtr basis, std::size_t rank) {
  const std::size_t dim = basis->dim();
  GinibreSpec{dim, rank, false}.validate();
  auto b = basis;
  return PriorDistribution(
      basis, PriorKind::fiducial, "ginibre(D=" + std::to_string(dim) + ",K=" + std::to_string(rank) + ")",
      [b, dim, rank](RngStream& rng) { return b->coords(ginibre_state(dim, rank, rng).matrix()); });
}

PriorDistribution bures_prior(BasisPtr basis) {
  const std::size_t dim = basis->dim();
  auto b = basis;
  return PriorDistribution(basis, PriorKind::fiducial, "bures(D=" + std::to_string(dim) + ")",
                           [b, dim](RngStream& rng) { return b->coords(bures_state(dim, rng).matrix()); });
}

PriorDistribution rebit_prior(BasisPtr basis, std::size_t rank) {
  if (basis->dim() != 2) throw DimensionMismatch("rebit prior needs a qubit basis");
  if (rank < 1 || rank > 2) throw InvalidArgument("rebit rank must be 1 or 2");
  auto b = basis;
  return PriorDistribution(basis, PriorKind::fiducial, "rebit(K=" + std::to_string(rank) + ")",
                           [b, rank](RngStream& rng) {
                             return b->coords(ginibre_rebit_state(rank, rng).matrix());
                           });
}

PriorDistribution bcsz_prior(BasisPtr basis, std::size_t channel_dim, std::size_t kraus_rank) {
  if (channel_dim * channel_dim != basis->dim()) {
    throw DimensionMismatch("BCSZ prior basis must act on D^2 x D^2 operators");
  }
  if (kraus_rank < 1 || kraus_rank > channel_dim * channel_dim) {
    throw InvalidArgument("BCSZ Kraus rank must satisfy 1 <= K <= D^2");
  }
  auto b = basis;
  return PriorDistribution(
      basis, PriorKind::fiducial,
      "bcsz(D=" + std::to_string(channel_dim) + ",K=" + std::to_string(kraus_rank) + ")",
      [b, channel_dim, kraus_rank](RngStream& rng) {
        return b->coords(bcsz_channel(channel_dim, kraus_rank, rng).matrix());
      },
      channel_dim);
}

GadParams gad_params(const CMatrix& rho_mu) {
  const auto mean = DensityOperator::from_matrix(rho_mu);
  const double dim = static_cast<double>(mean.dim());
  GadParams p;
  p.lambda_min = min_eigenvalue(mean.matrix());
  const double gap = 1.0 - dim * p.lambda_min;
  if (gap <= 1e-12) {
    p.passthrough = true;
    p.beta = std::numeric_limits<double>::infinity();
    p.rho_star = mean.matrix();
    return p;
  }
  if (p.lambda_min <= kLambdaFloor) {
    std::ostringstream os;
    os << "prior mean has minimum eigenvalue " << p.lambda_min
       << "; mix it with the maximally mixed state so that it exceeds " << kLambdaFloor;
    throw InvalidArgument(os.str());
  }
  p.alpha = 1.0;
  p.beta = dim * p.lambda_min / gap;
  const double total = p.alpha + p.beta;
  p.rho_star = (total / p.alpha) * (mean.matrix() - (p.beta / total) * identity(mean.dim()) / dim);
  p.rho_star = 0.5 * (p.rho_star + p.rho_star.adjoint()).eval();
  return p;
}

GadPrior make_gad_prior(PriorDistribution fiducial, const CMatrix& rho_mu) {
  if (static_cast<std::size_t>(rho_mu.rows()) != fiducial.dim()) {
    throw DimensionMismatch("prior mean dimension does not match the fiducial prior");
  }
  GadParams p = gad_params(rho_mu);
  if (!p.passthrough) {
    if (auto d = fiducial.channel_dim()) {
      // rho_mu and 1/D^2 are both trace preserving, so their affine combination is too;
      // this only removes roundoff.
      if (trace_preservation_defect(p.rho_star, *d) > 1e-6) {
        throw InvalidOperator("channel GAD fixed point is not trace preserving");
      }
      CMatrix fixed;
      if (restore_trace_preservation(p.rho_star, *d, 0.0, fixed)) p.rho_star = fixed;
    }
    if (min_eigenvalue(p.rho_star) < -1e-8) throw InvalidOperator("GAD fixed point is not PSD");
  }
  RVector star = fiducial.basis()->coords(p.rho_star);
  return GadPrior{std::move(fiducial), rho_mu,   p.rho_star,     std::move(star),
                  p.alpha,             p.beta,   p.lambda_min,   p.passthrough};
}

double sample_beta_one(double beta, RngStream& rng) {
  const double u = rng.uniform();
  return 1.0 - std::pow(u, 1.0 / beta);
}

RVector gad_sample(const GadPrior& prior, RngStream& rng) {
  RVector x = prior.fiducial.sample(rng);
  if (prior.passthrough) return x;
  const double eps = sample_beta_one(prior.beta, rng);
  return (1.0 - eps) * x + eps * prior.rho_star_coords;
}

PriorDistribution insightful_prior(PriorDistribution fiducial, const CMatrix& rho_mu) {
  auto gad = std::make_shared<const GadPrior>(make_gad_prior(fiducial, rho_mu));
  if (gad->passthrough) return fiducial;
  std::ostringstream os;
  os << "gad[" << fiducial.description() << ", beta=" << gad->beta << "]";
  return PriorDistribution(
      fiducial.basis(), PriorKind::insightful, os.str(),
      [gad](RngStream& rng) { return gad_sample(*gad, rng); }, fiducial.channel_dim());
}

CoinPrior coin_gad_params(double p_mu) {
  if (!(p_mu > 0.0 && p_mu < 1.0)) throw InvalidArgument("coin prior mean must lie in (0, 1)");
  CoinPrior c;
  c.p_mu = p_mu;
  const double lambda_min = std::min(p_mu, 1.0 - p_mu);
  const double gap = 1.0 - 2.0 * lambda_min;
  if (gap <= 1e-12) {
    c.passthrough = true;
    c.beta = std::numeric_limits<double>::infinity();
    c.p_star = 0.5;
    return c;
  }
  c.passthrough = false;
  c.alpha = 1.0;
  c.beta = 2.0 * lambda_min / gap;
  const double total = c.alpha + c.beta;
  c.p_star = (total / c.alpha) * (p_mu - c.beta / (2.0 * total));
  return c;
}

double coin_gad_sample(const CoinPrior& prior, RngStream& rng) {
  const double p = rng.uniform();
  if (prior.passthrough) return p;
  const double eps = sample_beta_one(prior.beta, rng);
  return std::clamp((1.0 - eps) * p + eps * prior.p_star, 0.0, 1.0);
}

}  // namespace tomolab
