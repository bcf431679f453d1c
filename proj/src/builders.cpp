#include "decoq/builders.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace decoq {

namespace {

ComplexMatrix single_pauli(char c) {
  ComplexMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default:
      throw std::invalid_argument(std::string("pauli_string: unknown letter '") + c + "'");
  }
  return m;
}

}  // namespace

ComplexMatrix pauli_string(std::string_view word) {
  if (word.empty()) throw std::invalid_argument("pauli_string: empty word");
  ComplexMatrix out = single_pauli(word[0]);
  for (size_t k = 1; k < word.size(); ++k) out = tensor(out, single_pauli(word[k]));
  return out;
}

ComplexMatrix boson_annihilate(int d) {
  if (d < 2) throw std::invalid_argument("boson_annihilate: need at least 2 levels");
  ComplexMatrix a = ComplexMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

ComplexMatrix ketbra(int i, int j, int d) {
  if (d < 1 || i < 0 || j < 0 || i >= d || j >= d)
    throw std::invalid_argument("ketbra: index out of range");
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

StateVector basis_ket(int i, int d) {
  if (d < 1 || i < 0 || i >= d) throw std::invalid_argument("basis_ket: index out of range");
  StateVector v = StateVector::Zero(d);
  v(i) = 1.0;
  return v;
}

int hamming_weight(int i) { return std::popcount(unsigned(i)); }

HilbertFactorization::HilbertFactorization(int system_dim, int env_dim)
    : d_s(system_dim), d_e(env_dim) {
  if (d_s < 1 || d_e < 1) throw std::invalid_argument("HilbertFactorization: dims must be >= 1");
}

ComplexMatrix HilbertFactorization::embed_system(const ComplexMatrix& M) const {
  require_square(M, "embed_system");
  if (M.rows() != d_s) throw std::invalid_argument("embed_system: dimension mismatch");
  return tensor(M, ComplexMatrix::Identity(d_e, d_e));
}

ComplexMatrix HilbertFactorization::embed_env(const ComplexMatrix& B) const {
  require_square(B, "embed_env");
  if (B.rows() != d_e) throw std::invalid_argument("embed_env: dimension mismatch");
  return tensor(ComplexMatrix::Identity(d_s, d_s), B);
}

}  // namespace decoq
