#include "decoq/matrix_ops.hpp"

#include <stdexcept>
#include <string>

namespace decoq {

void require_square(const ComplexMatrix& M, const char* what) {
  if (M.rows() != M.cols() || M.rows() < 1)
    throw std::invalid_argument(std::string(what) + ": matrix must be square, got " +
                                std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
}

void require_same_dim(const ComplexMatrix& A, const ComplexMatrix& B, const char* what) {
  require_square(A, what);
  require_square(B, what);
  if (A.rows() != B.rows())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch " +
                                std::to_string(A.rows()) + " vs " + std::to_string(B.rows()));
}

ComplexMatrix commutator(const ComplexMatrix& A, const ComplexMatrix& B) {
  require_same_dim(A, B, "commutator");
  return A * B - B * A;
}

double frobenius_norm(const ComplexMatrix& M) { return M.norm(); }

bool is_hermitian(const ComplexMatrix& M, double tol) {
  if (M.rows() != M.cols()) return false;
  return (M - M.adjoint()).norm() <= tol;
}

bool is_skew_hermitian(const ComplexMatrix& M, double tol) {
  if (M.rows() != M.cols()) return false;
  return (M + M.adjoint()).norm() <= tol;
}

bool is_unitary(const ComplexMatrix& M, double tol) {
  if (M.rows() != M.cols()) return false;
  ComplexMatrix G = M.adjoint() * M;
  return (G - ComplexMatrix::Identity(M.rows(), M.cols())).norm() <= tol;
}

ComplexMatrix tensor(const ComplexMatrix& A, const ComplexMatrix& B) {
  ComplexMatrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Complex matrix_inner(const ComplexMatrix& A, const ComplexMatrix& B) {
  return (A.adjoint() * B).trace();
}

}  // namespace decoq
