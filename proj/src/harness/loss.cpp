#include "tomolab/errors.hpp"
#include "tomolab/harness.hpp"

namespace tomolab::harness {

double quadratic_loss(const VectorizedOperator& est, const VectorizedOperator& truth,
                      const std::optional<RMatrix>& q) {
  if (est.basis_id != truth.basis_id) throw DimensionMismatch("loss operands are in different bases");
  if (est.coords.size() != truth.coords.size()) throw DimensionMismatch("loss operands differ in length");
  const RVector diff = est.coords - truth.coords;
  if (!q) return diff.squaredNorm();
  if (q->rows() != diff.size() || q->cols() != diff.size()) throw DimensionMismatch("loss matrix has the wrong shape");
  return diff.dot(*q * diff);
}

}  // namespace tomolab::harness
