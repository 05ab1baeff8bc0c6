#include "tomolab/linalg.hpp"

#include <cmath>

namespace tomolab {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hermiticity_defect(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& a, double tol) {
  return a.rows() == a.cols() && hermiticity_defect(a) <= tol;
}

RVector hermitian_eigenvalues(const CMatrix& a) {
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const CMatrix& a) { return hermitian_eigenvalues(a).minCoeff(); }

double max_eigenvalue(const CMatrix& a) { return hermitian_eigenvalues(a).maxCoeff(); }

bool inverse_sqrt_psd(const CMatrix& a, double floor, CMatrix& out) {
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const RVector& ev = es.eigenvalues();
  if (ev.minCoeff() < floor) return false;
  const RVector inv_sqrt = ev.cwiseSqrt().cwiseInverse();
  out = es.eigenvectors() * inv_sqrt.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return true;
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  return 0.5 * hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

double purity(const CMatrix& a) { return (a * a).trace().real(); }

CMatrix identity(std::size_t dim) {
  return CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

}  // namespace tomolab
