#pragma once

// The set a particle is allowed to occupy, and the projection back onto it.
// Resampling noise and tracking diffusion both push particles off the set;
// they share one projection so there is a single notion of "valid".

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "tomolab/qobj.hpp"

namespace tomolab {

class StateSpace {
 public:
  virtual ~StateSpace() = default;
  virtual std::size_t n_params() const = 0;
  virtual const std::string& basis_id() const = 0;
  /// Coordinates before this index are fixed by normalization and never perturbed.
  virtual std::size_t first_free() const = 0;
  /// In-place projection. Points already in the set are left alone (up to 1e-12).
  virtual void project(std::span<double> x) const = 0;
  virtual bool contains(std::span<const double> x, double tol = 1e-8) const = 0;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

/// Density operators, in coordinates of `basis`.
class DensitySpace : public StateSpace {
 public:
  explicit DensitySpace(BasisPtr basis);
  std::size_t n_params() const override { return basis_->size(); }
  const std::string& basis_id() const override { return basis_->name(); }
  std::size_t first_free() const override { return 1; }
  void project(std::span<double> x) const override;
  bool contains(std::span<const double> x, double tol = 1e-8) const override;
  const BasisPtr& basis() const { return basis_; }

 private:
  BasisPtr basis_;
  double trace_coord_;
};

/// Normalized Choi states J/D of trace-preserving channels on C^D.
class ChoiSpace : public StateSpace {
 public:
  ChoiSpace(BasisPtr basis, std::size_t channel_dim);
  std::size_t n_params() const override { return basis_->size(); }
  const std::string& basis_id() const override { return basis_->name(); }
  std::size_t first_free() const override { return 1; }
  /// Eigenvalue truncation followed by the trace-preservation rescaling.
  void project(std::span<double> x) const override;
  bool contains(std::span<const double> x, double tol = 1e-8) const override;
  const BasisPtr& basis() const { return basis_; }
  std::size_t channel_dim() const { return channel_dim_; }

 private:
  BasisPtr basis_;
  std::size_t channel_dim_;
  double trace_coord_;
};

/// Heads probability of a coin: one coordinate p in [0, 1].
class CoinSpace : public StateSpace {
 public:
  std::size_t n_params() const override { return 1; }
  const std::string& basis_id() const override;
  std::size_t first_free() const override { return 0; }
  void project(std::span<double> x) const override;
  bool contains(std::span<const double> x, double tol = 1e-8) const override;
};

}  // namespace tomolab
