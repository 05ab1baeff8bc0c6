#include "tomolab/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tomolab/errors.hpp"
#include "tomolab/parallel.hpp"

namespace tomolab {

DensityOperator truncate_to_state(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionMismatch("truncate_to_state needs a square matrix");
  if (hermiticity_defect(m) > 1e-8) throw InvalidOperator("truncate_to_state needs a Hermitian matrix");
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  RVector ev = es.eigenvalues().cwiseMax(0.0);
  const double total = ev.sum();
  if (!(total > 0.0)) throw DegenerateProjection("no positive eigenvalue to renormalize");
  ev /= total;
  CMatrix out = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator::from_matrix(std::move(out));
}

double coin_truncate(double p) { return std::clamp(p, 0.0, 1.0); }

void DiffusionStep::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("diffusion step needs dt > 0");
  if (drift.size() > 0 && drift.cwiseAbs().maxCoeff() != 0.0) {
    throw InvalidArgument("nonzero drift is not supported");
  }
}

void diffuse_cloud(ParticleCloud& cloud, const StateSpace& space, const DiffusionStep& step,
                   RngStream& rng) {
  step.validate();
  if (!cloud.tracked()) throw InvalidArgument("cloud has no diffusion rates attached");
  if (cloud.dim() != space.n_params()) throw DimensionMismatch("cloud does not match the state space");
  const std::size_t d = cloud.dim();
  const std::size_t first = space.first_free();
  const double root_dt = std::sqrt(step.dt);
  const RngStream root = rng.split(rng());
  parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double sigma = root_dt * cloud.etas[static_cast<Eigen::Index>(i)];
      if (sigma == 0.0) continue;
      RngStream r = root.split(i);
      std::normal_distribution<double> normal(0.0, sigma);
      auto row = cloud.row(i);
      std::vector<double> before(row.begin(), row.end());
      for (std::size_t j = first; j < d; ++j) row[j] += normal(r);
      try {
        space.project(row);
      } catch (const DegenerateProjection&) {
        std::copy(before.begin(), before.end(), row.begin());
      }
    }
  }, 64);
}

Bandwidth tracking_bandwidth(double tol, double z, double dt) {
  if (!(tol > 0.0 && tol < 0.5)) throw InvalidArgument("tolerance must lie in (0, 1/2)");
  if (!(z > 0.0) || !(dt > 0.0)) throw InvalidArgument("z and dt must be positive");
  const double exact = z * z / (4.0 * tol * tol);
  // Guard against 400.00000000000006 rounding up when the ratio is an integer.
  const auto n = static_cast<unsigned long>(std::ceil(exact * (1.0 - 1e-12)));
  return Bandwidth{n, 1.0 / (2.0 * dt * static_cast<double>(n))};
}

double EtaPrior::sample(RngStream& rng) const {
  if (mean < 0.0 || log_std < 0.0) throw InvalidArgument("eta prior needs mean >= 0 and log_std >= 0");
  if (mean == 0.0) return 0.0;
  if (log_std == 0.0) return mean;
  std::lognormal_distribution<double> draw(std::log(mean) - 0.5 * log_std * log_std, log_std);
  return draw(rng);
}

void attach_etas(ParticleCloud& cloud, const EtaPrior& prior, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(cloud.size());
  cloud.etas.resize(n);
  const RngStream root = rng.split(rng());
  for (Eigen::Index i = 0; i < n; ++i) {
    RngStream r = root.split(static_cast<std::uint64_t>(i));
    cloud.etas[i] = prior.sample(r);
  }
}

double eta_mean(const ParticleCloud& cloud) {
  if (!cloud.tracked()) return 0.0;
  return cloud.weights.dot(cloud.etas);
}

}  // namespace tomolab
