#include "tomolab/state_space.hpp"

#include <algorithm>
#include <cmath>

#include "tomolab/errors.hpp"
#include "tomolab/tracking.hpp"

namespace tomolab {

namespace {

constexpr double kInteriorTol = 1e-12;
constexpr double kMarginalFloor = 1e-12;

void check_length(std::span<const double> x, std::size_t n) {
  if (x.size() != n) throw DimensionMismatch("coordinate vector has the wrong length");
}

void store(const OperatorBasis& basis, const CMatrix& m, double trace_coord, std::span<double> x) {
  const RVector c = basis.coords(m);
  std::copy(c.data(), c.data() + c.size(), x.begin());
  x[0] = trace_coord;
}

}  // namespace

DensitySpace::DensitySpace(BasisPtr basis)
    : basis_(std::move(basis)), trace_coord_(1.0 / std::sqrt(static_cast<double>(basis_->dim()))) {}

void DensitySpace::project(std::span<double> x) const {
  check_length(x, basis_->size());
  x[0] = trace_coord_;
  const CMatrix m = basis_->matrix(x.data());
  if (min_eigenvalue(m) >= -kInteriorTol) return;
  store(*basis_, truncate_to_state(m).matrix(), trace_coord_, x);
}

bool DensitySpace::contains(std::span<const double> x, double tol) const {
  check_length(x, basis_->size());
  if (std::abs(x[0] - trace_coord_) > tol) return false;
  return min_eigenvalue(basis_->matrix(x.data())) >= -tol;
}

ChoiSpace::ChoiSpace(BasisPtr basis, std::size_t channel_dim)
    : basis_(std::move(basis)),
      channel_dim_(channel_dim),
      trace_coord_(1.0 / std::sqrt(static_cast<double>(basis_->dim()))) {
  if (channel_dim_ * channel_dim_ != basis_->dim()) {
    throw DimensionMismatch("Choi space basis must act on D^2 x D^2 operators");
  }
}

void ChoiSpace::project(std::span<double> x) const {
  check_length(x, basis_->size());
  x[0] = trace_coord_;
  const CMatrix m = basis_->matrix(x.data());
  if (min_eigenvalue(m) >= -kInteriorTol && trace_preservation_defect(m, channel_dim_) <= kInteriorTol) {
    return;
  }
  const CMatrix clipped = truncate_to_state(m).matrix();
  CMatrix fixed;
  if (!restore_trace_preservation(clipped, channel_dim_, kMarginalFloor, fixed)) {
    throw DegenerateProjection("truncated Choi state has a singular input marginal");
  }
  store(*basis_, fixed, trace_coord_, x);
}

bool ChoiSpace::contains(std::span<const double> x, double tol) const {
  check_length(x, basis_->size());
  if (std::abs(x[0] - trace_coord_) > tol) return false;
  const CMatrix m = basis_->matrix(x.data());
  return min_eigenvalue(m) >= -tol && trace_preservation_defect(m, channel_dim_) <= tol;
}

const std::string& CoinSpace::basis_id() const {
  static const std::string id = "coin";
  return id;
}

void CoinSpace::project(std::span<double> x) const {
  check_length(x, 1);
  x[0] = coin_truncate(x[0]);
}

bool CoinSpace::contains(std::span<const double> x, double tol) const {
  check_length(x, 1);
  return x[0] >= -tol && x[0] <= 1.0 + tol;
}

}  // namespace tomolab
