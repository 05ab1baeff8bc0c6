#include "tomolab/qobj.hpp"

#include <cmath>
#include <sstream>

#include "tomolab/errors.hpp"

namespace tomolab {

namespace {

std::string dim_message(const char* what, std::size_t expected, std::size_t got) {
  std::ostringstream os;
  os << what << ": expected dimension " << expected << ", got " << got;
  return os.str();
}

CMatrix pauli_matrix(char which) {
  CMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (which) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw InvalidArgument(std::string("unknown Pauli letter ") + which);
  }
  return m;
}

}  // namespace

OperatorBasis::OperatorBasis(std::string name, std::vector<CMatrix> elements,
                             std::vector<std::string> labels)
    : name_(std::move(name)), elements_(std::move(elements)), labels_(std::move(labels)) {
  if (elements_.empty()) throw InvalidArgument("operator basis needs at least one element");
  dim_ = static_cast<std::size_t>(elements_.front().rows());
  if (elements_.size() != dim_ * dim_) {
    throw InvalidArgument("operator basis must have D^2 elements");
  }
  if (labels_.size() != elements_.size()) throw InvalidArgument("one label per basis element");

  const auto d2 = static_cast<Eigen::Index>(dim_ * dim_);
  conj_rows_.resize(d2, d2);
  columns_.resize(d2, d2);
  for (std::size_t a = 0; a < elements_.size(); ++a) {
    const CMatrix& b = elements_[a];
    if (static_cast<std::size_t>(b.rows()) != dim_ || b.rows() != b.cols()) {
      throw DimensionMismatch("basis elements must all be D x D");
    }
    if (!is_hermitian(b, kHermitianTol)) throw InvalidOperator("basis element is not Hermitian");
    const Eigen::Map<const CVector> v(b.data(), d2);
    conj_rows_.row(static_cast<Eigen::Index>(a)) = v.conjugate().transpose();
    columns_.col(static_cast<Eigen::Index>(a)) = v;
  }
  const CMatrix gram = conj_rows_ * columns_;
  if ((gram - CMatrix::Identity(d2, d2)).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw InvalidOperator("basis is not orthonormal under the Hilbert-Schmidt product");
  }
  const CMatrix expected0 = identity(dim_) / std::sqrt(static_cast<double>(dim_));
  if ((elements_[0] - expected0).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw InvalidOperator("basis element 0 must be 1/sqrt(D)");
  }
  for (std::size_t a = 1; a < elements_.size(); ++a) {
    if (std::abs(elements_[a].trace()) > kHermitianTol) {
      throw InvalidOperator("only basis element 0 may carry trace");
    }
  }
}

RVector OperatorBasis::coords(const CMatrix& op) const {
  if (op.rows() != op.cols() || static_cast<std::size_t>(op.rows()) != dim_) {
    throw DimensionMismatch(dim_message("vectorize", dim_, static_cast<std::size_t>(op.rows())));
  }
  const Eigen::Map<const CVector> v(op.data(), op.size());
  return (conj_rows_ * v).real();
}

CMatrix OperatorBasis::matrix(const RVector& coords) const {
  if (static_cast<std::size_t>(coords.size()) != size()) {
    throw DimensionMismatch(dim_message("devectorize", size(), static_cast<std::size_t>(coords.size())));
  }
  return matrix(coords.data());
}

CMatrix OperatorBasis::matrix(const double* coords) const {
  const auto d2 = static_cast<Eigen::Index>(size());
  const Eigen::Map<const RVector> x(coords, d2);
  const CVector flat = columns_ * x.cast<Complex>();
  return Eigen::Map<const CMatrix>(flat.data(), static_cast<Eigen::Index>(dim_),
                                   static_cast<Eigen::Index>(dim_));
}

int OperatorBasis::index_of(const std::string& label) const {
  for (std::size_t a = 0; a < labels_.size(); ++a) {
    if (labels_[a] == label) return static_cast<int>(a);
  }
  return -1;
}

BasisPtr pauli_basis(std::size_t n_qubits) {
  if (n_qubits < 1) throw InvalidArgument("pauli_basis needs at least one qubit");
  const std::size_t count = std::size_t{1} << (2 * n_qubits);
  const double norm = std::sqrt(static_cast<double>(std::size_t{1} << n_qubits));
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};

  std::vector<CMatrix> elements;
  std::vector<std::string> labels;
  elements.reserve(count);
  labels.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    std::string label(n_qubits, 'I');
    for (std::size_t q = 0; q < n_qubits; ++q) {
      const std::size_t digit = (code >> (2 * (n_qubits - 1 - q))) & 3u;
      label[q] = kLetters[digit];
    }
    CMatrix m = pauli_matrix(label[0]);
    for (std::size_t q = 1; q < n_qubits; ++q) m = kron(m, pauli_matrix(label[q]));
    elements.push_back(m / norm);
    labels.push_back(label);
  }
  return std::make_shared<const OperatorBasis>("pauli" + std::to_string(n_qubits),
                                               std::move(elements), std::move(labels));
}

BasisPtr gell_mann_basis(std::size_t dim) {
  if (dim < 2) throw InvalidArgument("gell_mann_basis needs D >= 2");
  const auto d = static_cast<Eigen::Index>(dim);
  const Complex i(0.0, 1.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::vector<CMatrix> elements;
  std::vector<std::string> labels;
  elements.push_back(identity(dim) / std::sqrt(static_cast<double>(dim)));
  labels.emplace_back("I");
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      CMatrix s = CMatrix::Zero(d, d);
      s(j, k) = s(k, j) = inv_sqrt2;
      elements.push_back(s);
      labels.push_back("S" + std::to_string(j) + std::to_string(k));

      CMatrix a = CMatrix::Zero(d, d);
      a(j, k) = -i * inv_sqrt2;
      a(k, j) = i * inv_sqrt2;
      elements.push_back(a);
      labels.push_back("A" + std::to_string(j) + std::to_string(k));
    }
  }
  for (Eigen::Index l = 1; l < d; ++l) {
    CMatrix m = CMatrix::Zero(d, d);
    const double norm = std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index j = 0; j < l; ++j) m(j, j) = 1.0 / norm;
    m(l, l) = -static_cast<double>(l) / norm;
    elements.push_back(m);
    labels.push_back("D" + std::to_string(l));
  }
  return std::make_shared<const OperatorBasis>("gellmann" + std::to_string(dim),
                                               std::move(elements), std::move(labels));
}

BasisPtr tensor_basis(const OperatorBasis& a, const OperatorBasis& b) {
  std::vector<CMatrix> elements;
  std::vector<std::string> labels;
  elements.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      elements.push_back(kron(a.element(i), b.element(j)));
      labels.push_back(a.labels()[i] + "." + b.labels()[j]);
    }
  }
  return std::make_shared<const OperatorBasis>(a.name() + "x" + b.name(), std::move(elements),
                                               std::move(labels));
}

VectorizedOperator vectorize(const CMatrix& op, const OperatorBasis& basis) {
  return {basis.coords(op), basis.name()};
}

CMatrix devectorize(const VectorizedOperator& v, const OperatorBasis& basis) {
  if (!v.basis_id.empty() && v.basis_id != basis.name()) {
    throw DimensionMismatch("coordinates belong to basis '" + v.basis_id + "', not '" +
                            basis.name() + "'");
  }
  return basis.matrix(v.coords);
}

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("hs_inner: operands differ in shape");
  }
  return a.conjugate().cwiseProduct(b).sum();
}

CMatrix partial_trace(const CMatrix& op, std::size_t da, std::size_t db, Keep keep) {
  const auto a = static_cast<Eigen::Index>(da);
  const auto b = static_cast<Eigen::Index>(db);
  if (op.rows() != op.cols() || op.rows() != a * b || da == 0 || db == 0) {
    throw DimensionMismatch("partial_trace: operator is not " + std::to_string(da) + "x" +
                            std::to_string(db) + " factorable");
  }
  if (keep == Keep::first) {
    CMatrix out = CMatrix::Zero(a, a);
    for (Eigen::Index i = 0; i < a; ++i)
      for (Eigen::Index j = 0; j < a; ++j)
        for (Eigen::Index k = 0; k < b; ++k) out(i, j) += op(i * b + k, j * b + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(b, b);
  for (Eigen::Index k = 0; k < a; ++k) out += op.block(k * b, k * b, b, b);
  return out;
}

DensityOperator DensityOperator::from_matrix(CMatrix m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionMismatch("density operator must be square");
  if (hermiticity_defect(m) > tol) throw InvalidOperator("density operator is not Hermitian");
  CMatrix h = 0.5 * (m + m.adjoint());
  if (std::abs(h.trace().real() - 1.0) > tol) throw InvalidOperator("density operator trace != 1");
  if (min_eigenvalue(h) < -tol) throw InvalidOperator("density operator is not PSD");
  return DensityOperator(std::move(h));
}

DensityOperator DensityOperator::maximally_mixed(std::size_t dim) {
  return DensityOperator(identity(dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::pure(const CVector& psi) {
  const CVector u = psi.normalized();
  return DensityOperator(u * u.adjoint());
}

Effect Effect::from_matrix(CMatrix m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw DimensionMismatch("effect must be square");
  if (hermiticity_defect(m) > tol) throw InvalidOperator("effect is not Hermitian");
  CMatrix h = 0.5 * (m + m.adjoint());
  const RVector ev = hermitian_eigenvalues(h);
  if (ev.minCoeff() < -tol || ev.maxCoeff() > 1.0 + tol) {
    throw InvalidOperator("effect spectrum leaves [0, 1]");
  }
  return Effect(std::move(h));
}

Effect Effect::projector(const CVector& psi) {
  const CVector u = psi.normalized();
  return Effect(u * u.adjoint());
}

double trace_preservation_defect(const CMatrix& choi, std::size_t dim) {
  const CMatrix reduced = partial_trace(choi, dim, dim, Keep::first);
  return (reduced - identity(dim) / static_cast<double>(dim)).cwiseAbs().maxCoeff();
}

ChoiState ChoiState::from_matrix(CMatrix m, std::size_t dim, double tp_tol) {
  if (static_cast<std::size_t>(m.rows()) != dim * dim) {
    throw DimensionMismatch(dim_message("Choi state", dim * dim, static_cast<std::size_t>(m.rows())));
  }
  DensityOperator rho = DensityOperator::from_matrix(std::move(m));
  if (trace_preservation_defect(rho.matrix(), dim) > tp_tol) {
    throw InvalidOperator("Choi state is not trace preserving");
  }
  return ChoiState(rho.matrix(), dim);
}

ChoiState choi_of_channel(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw InvalidArgument("choi_of_channel: empty Kraus set");
  const Eigen::Index d = kraus.front().rows();
  CMatrix completeness = CMatrix::Zero(d, d);
  for (const CMatrix& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw DimensionMismatch("Kraus operators must be D x D");
    completeness += k.adjoint() * k;
  }
  if ((completeness - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kTracePreservingTol) {
    throw InvalidOperator("Kraus set is not trace preserving");
  }
  CMatrix j = CMatrix::Zero(d * d, d * d);
  for (const CMatrix& k : kraus) {
    const Eigen::Map<const CVector> v(k.data(), d * d);
    j += v * v.adjoint();
  }
  return ChoiState::from_matrix(j / static_cast<double>(d), static_cast<std::size_t>(d));
}

std::vector<CMatrix> kraus_of_choi(const ChoiState& choi) {
  const auto d = static_cast<Eigen::Index>(choi.dim());
  const CMatrix j = choi.matrix() * static_cast<double>(d);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(j);
  std::vector<CMatrix> kraus;
  for (Eigen::Index a = 0; a < j.rows(); ++a) {
    const double lambda = es.eigenvalues()(a);
    if (lambda <= 1e-14) continue;
    const CVector v = std::sqrt(lambda) * es.eigenvectors().col(a);
    kraus.emplace_back(Eigen::Map<const CMatrix>(v.data(), d, d));
  }
  return kraus;
}

CMatrix apply_kraus(const std::vector<CMatrix>& kraus, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (const CMatrix& k : kraus) out += k * rho * k.adjoint();
  return out;
}

CMatrix apply_choi(const CMatrix& choi, std::size_t dim, const CMatrix& rho) {
  if (static_cast<std::size_t>(rho.rows()) != dim) throw DimensionMismatch("apply_choi: input dimension");
  const CMatrix lifted = choi * kron(rho.transpose(), identity(dim));
  return static_cast<double>(dim) * partial_trace(lifted, dim, dim, Keep::second);
}

ProcessEffect process_effect(const DensityOperator& prep, const Effect& meas) {
  if (prep.dim() != meas.dim()) throw DimensionMismatch("process_effect: prep and meas dimensions differ");
  const double d = static_cast<double>(prep.dim());
  return ProcessEffect(kron(prep.matrix().transpose() * d, meas.matrix()), prep.dim());
}

bool restore_trace_preservation(const CMatrix& m, std::size_t dim, double floor, CMatrix& out) {
  const CMatrix y = partial_trace(m, dim, dim, Keep::first);
  CMatrix y_inv_sqrt;
  if (!inverse_sqrt_psd(y, floor, y_inv_sqrt)) return false;
  const CMatrix lift = kron(y_inv_sqrt, identity(dim));
  out = lift * m * lift / static_cast<double>(dim);
  out = 0.5 * (out + out.adjoint()).eval();
  return true;
}

}  // namespace tomolab
