#ifndef DECOQ_MATRIX_OPS_HPP
#define DECOQ_MATRIX_OPS_HPP

#include <complex>
#include <Eigen/Dense>

namespace decoq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

constexpr double kMatrixZeroTol = 1e-10;  // absolute, Frobenius
constexpr double kFreqTol = 1e-9;         // rad/time
constexpr double kRankTol = 1e-9;         // relative, span maintenance

/// [A,B] = AB - BA. Throws on dimension mismatch.
ComplexMatrix commutator(const ComplexMatrix& A, const ComplexMatrix& B);

double frobenius_norm(const ComplexMatrix& M);

bool is_hermitian(const ComplexMatrix& M, double tol = kMatrixZeroTol);
bool is_skew_hermitian(const ComplexMatrix& M, double tol = kMatrixZeroTol);
bool is_unitary(const ComplexMatrix& M, double tol = kMatrixZeroTol);

/// Kronecker product, row-major block convention: (A⊗B)(i*p+k, j*q+l) = A(i,j)B(k,l).
ComplexMatrix tensor(const ComplexMatrix& A, const ComplexMatrix& B);
StateVector tensor(const StateVector& a, const StateVector& b);

/// Frobenius inner product tr(A†B).
Complex matrix_inner(const ComplexMatrix& A, const ComplexMatrix& B);

void require_square(const ComplexMatrix& M, const char* what);
void require_same_dim(const ComplexMatrix& A, const ComplexMatrix& B, const char* what);

}  // namespace decoq

#endif
