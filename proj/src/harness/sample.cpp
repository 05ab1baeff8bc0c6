#include "tomolab/errors.hpp"
#include "tomolab/harness.hpp"

namespace tomolab::harness {

SampleDump sample_prior(const std::string& prior, std::size_t dim, std::size_t rank, std::size_t n,
                        std::uint64_t seed) {
  if (n < 1) throw ConfigError("--n: must be at least 1");
  if (dim < 1 || dim > 16) throw ConfigError("--dim: expected 1 <= dim <= 16");
  ModelSpec model;
  model.kind = prior == "bcsz" ? ModelKind::channel : ModelKind::state;
  model.dim = dim;
  if (model.kind == ModelKind::channel && dim > 4) throw ConfigError("--dim: channels are limited to dim <= 4");
  const Setup setup = make_setup(model);
  PriorSpec spec;
  spec.fiducial = prior;
  spec.rank = rank;
  const ParticleSampler sampler = make_sampler(spec, setup);
  SampleDump dump{setup.basis->name(), setup.basis->labels(),
                  RowMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(setup.basis->size()))};
  const RngStream root(seed, 0);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r = root.split(i);
    dump.draws.row(static_cast<Eigen::Index>(i)) = sampler(r).transpose();
  }
  return dump;
}

}  // namespace tomolab::harness
