#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace tomolab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Row-major n x d storage: one particle (coordinate vector) per row.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// max_ij |A - A^dagger|_ij
double hermiticity_defect(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double tol = 1e-10);

/// Eigenvalues (ascending) of the Hermitian part of `a`.
RVector hermitian_eigenvalues(const CMatrix& a);

double min_eigenvalue(const CMatrix& a);
double max_eigenvalue(const CMatrix& a);

/// A^{-1/2} for Hermitian PSD A. Returns false if an eigenvalue is below `floor`.
bool inverse_sqrt_psd(const CMatrix& a, double floor, CMatrix& out);

/// 1/2 Tr|A - B| for Hermitian A, B.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// Tr(A^2) for Hermitian A.
double purity(const CMatrix& a);

CMatrix identity(std::size_t dim);

}  // namespace tomolab
