#pragma once

// Finite-dimensional operator algebra: Hermitian operator bases, the real
// coordinate representation of operators, and the Choi-Jamiolkowski
// correspondence that turns process tomography into state tomography.

#include <memory>
#include <string>
#include <vector>

#include "tomolab/linalg.hpp"

namespace tomolab {

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kEigenFloorTol = 1e-10;
inline constexpr double kTracePreservingTol = 1e-8;

/// Orthonormal (Hilbert-Schmidt) basis of Hermitian D x D matrices.
///
/// Element 0 is always 1/sqrt(D) and is the only element with nonzero trace, so
/// the first coordinate of any unit-trace operator is 1/sqrt(D).
class OperatorBasis {
 public:
  /// Validates orthonormality and the traceful-first-element convention.
  OperatorBasis(std::string name, std::vector<CMatrix> elements, std::vector<std::string> labels);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const CMatrix& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<CMatrix>& elements() const { return elements_; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// coords[a] = Re Tr(B_a^dagger op). Throws DimensionMismatch.
  RVector coords(const CMatrix& op) const;

  /// sum_a coords[a] B_a. Throws DimensionMismatch.
  CMatrix matrix(const RVector& coords) const;
  CMatrix matrix(const double* coords) const;

  /// Index of the element labelled `label`, or -1.
  int index_of(const std::string& label) const;

 private:
  std::string name_;
  std::size_t dim_;
  std::vector<CMatrix> elements_;
  std::vector<std::string> labels_;
  // Row a holds conj(vec(B_a)) so that coords = Re(conj_rows_ * vec(op)).
  CMatrix conj_rows_;
  // Column a holds vec(B_a).
  CMatrix columns_;
};

using BasisPtr = std::shared_ptr<const OperatorBasis>;

/// Normalized Pauli strings over n qubits, identity string first.
/// Labels read like "IX", "ZZ" with the leftmost letter acting on the first factor.
BasisPtr pauli_basis(std::size_t n_qubits);

/// Generalized Gell-Mann basis for dimension D >= 2; element 0 is 1/sqrt(D).
BasisPtr gell_mann_basis(std::size_t dim);

/// {A_i (x) B_j}; orthonormal and Hermitian whenever both inputs are.
BasisPtr tensor_basis(const OperatorBasis& a, const OperatorBasis& b);

/// Real coordinate vector tied to the basis it was computed in.
struct VectorizedOperator {
  RVector coords;
  std::string basis_id;
};

VectorizedOperator vectorize(const CMatrix& op, const OperatorBasis& basis);
CMatrix devectorize(const VectorizedOperator& v, const OperatorBasis& basis);

/// Tr(A^dagger B).
Complex hs_inner(const CMatrix& a, const CMatrix& b);

enum class Keep { first, second };

/// Partial trace of an operator on C^{da} (x) C^{db}, keeping the named factor.
CMatrix partial_trace(const CMatrix& op, std::size_t da, std::size_t db, Keep keep);

/// Hermitian, unit-trace, PSD matrix.
class DensityOperator {
 public:
  /// Throws InvalidOperator when any invariant fails at tolerance `tol`.
  static DensityOperator from_matrix(CMatrix m, double tol = kHermitianTol);
  static DensityOperator maximally_mixed(std::size_t dim);
  static DensityOperator pure(const CVector& psi);

  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  explicit DensityOperator(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Measurement effect 0 <= E <= 1.
class Effect {
 public:
  static Effect from_matrix(CMatrix m, double tol = kHermitianTol);
  /// Projector onto span{psi} (psi is normalized internally).
  static Effect projector(const CVector& psi);

  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }

 private:
  explicit Effect(CMatrix m) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Composite prep-and-measure effect P (x) E acting on Choi states.
///
/// Its spectrum lies in [0, D] rather than [0, 1]; pairing it with any
/// trace-preserving Choi state still yields a probability.
class ProcessEffect {
 public:
  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return dim_; }

 private:
  friend ProcessEffect process_effect(const DensityOperator& prep, const Effect& meas);
  ProcessEffect(CMatrix m, std::size_t dim) : m_(std::move(m)), dim_(dim) {}
  CMatrix m_;
  std::size_t dim_;
};

/// Normalized Choi state J(Lambda)/D. The first tensor factor is the channel
/// input (reference) and the second is the output, so Tr_out(J/D) = 1/D.
class ChoiState {
 public:
  static ChoiState from_matrix(CMatrix m, std::size_t dim, double tp_tol = kTracePreservingTol);

  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return dim_; }

 private:
  ChoiState(CMatrix m, std::size_t dim) : m_(std::move(m)), dim_(dim) {}
  CMatrix m_;
  std::size_t dim_;
};

/// max_ij |Tr_out(choi) - 1/D|_ij
double trace_preservation_defect(const CMatrix& choi, std::size_t dim);

/// J(Lambda)/D from a Kraus decomposition (column-stacking convention).
/// Throws InvalidOperator if sum K^dagger K != 1 within 1e-8.
ChoiState choi_of_channel(const std::vector<CMatrix>& kraus);

/// Kraus operators recovered from the spectral decomposition of J(Lambda).
std::vector<CMatrix> kraus_of_choi(const ChoiState& choi);

/// sum_i K_i rho K_i^dagger
CMatrix apply_kraus(const std::vector<CMatrix>& kraus, const CMatrix& rho);

/// Lambda(rho) = D Tr_in[(rho^T (x) 1) J/D]
CMatrix apply_choi(const CMatrix& choi, std::size_t dim, const CMatrix& rho);

/// P (x) E with P = rho^T D, so that Tr[E Lambda(rho)] = <<P (x) E | J/D>>.
ProcessEffect process_effect(const DensityOperator& prep, const Effect& meas);

/// Rescales a PSD unit-trace matrix on C^D (x) C^D so that Tr_out = 1/D:
/// (Y^{-1/2} (x) 1) M (Y^{-1/2} (x) 1) / D with Y = Tr_out M.
/// Returns false if Y is singular below `floor`.
bool restore_trace_preservation(const CMatrix& m, std::size_t dim, double floor, CMatrix& out);

}  // namespace tomolab
