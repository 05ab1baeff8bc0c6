#pragma once

// Condensation-style tracking of a drifting state. Before each update every
// particle takes a Gaussian step whose width is set by its own rate eta, then
// is projected back onto the state set by eigenvalue truncation. Particles
// whose eta matches the true drift survive reweighting, so eta is learned
// alongside the state without appearing in the likelihood.

#include <cstddef>

#include "tomolab/linalg.hpp"
#include "tomolab/qobj.hpp"
#include "tomolab/rng.hpp"
#include "tomolab/smc.hpp"
#include "tomolab/state_space.hpp"

namespace tomolab {

/// Clip negative eigenvalues to zero and rescale to unit trace.
/// Throws DegenerateProjection if no eigenvalue is positive.
DensityOperator truncate_to_state(const CMatrix& m);

/// clamp(p, 0, 1)
double coin_truncate(double p);

struct DiffusionStep {
  double dt = 1.0;
  /// Deterministic drift. Only the zero drift is supported; kept for the record format.
  RVector drift;
  /// Throws InvalidArgument unless dt > 0 and drift is empty or zero.
  void validate() const;
};

/// Adds N(0, dt eta_i^2) to every free coordinate of particle i and projects
/// onto `space`. eta is left unchanged. Advances `rng` by one draw.
void diffuse_cloud(ParticleCloud& cloud, const StateSpace& space, const DiffusionStep& step,
                   RngStream& rng);

struct Bandwidth {
  unsigned long n_samples;
  double f_max;
};

/// N = ceil(z^2 / (4 tol^2)) samples pin a probability to +-tol at confidence z,
/// so oscillations above f_max = 1 / (2 dt N) cannot be followed.
Bandwidth tracking_bandwidth(double tol, double z, double dt);

/// Log-normal prior over eta with the given mean; log_std = 0 gives a point mass.
struct EtaPrior {
  double mean = 0.006;
  double log_std = 1.0;
  double sample(RngStream& rng) const;
};

/// Attaches eta draws to a cloud (one child stream per particle).
void attach_etas(ParticleCloud& cloud, const EtaPrior& prior, RngStream& rng);

/// Weighted mean of eta.
double eta_mean(const ParticleCloud& cloud);

}  // namespace tomolab
