#ifndef DECOQ_BUILDERS_HPP
#define DECOQ_BUILDERS_HPP

#include <string_view>

#include "decoq/matrix_ops.hpp"

namespace decoq {

/// Tensor product of single-qubit Paulis, leftmost letter = most significant qubit.
/// Word over {I,X,Y,Z}; throws on empty word or unknown letter.
ComplexMatrix pauli_string(std::string_view word);

/// Truncated ladder operator on d Fock levels, <n-1|a|n> = sqrt(n). Requires d >= 2.
ComplexMatrix boson_annihilate(int d);

/// |i><j| on a d-dimensional space.
ComplexMatrix ketbra(int i, int j, int d);

/// Computational basis vector |i> on a d-dimensional space.
StateVector basis_ket(int i, int d);

/// Number of 1s in the binary word labelling basis state i.
int hamming_weight(int i);

/// System ⊗ environment splitting of a joint Hilbert space; joint index = s*d_e + e.
struct HilbertFactorization {
  int d_s = 1;
  int d_e = 1;

  HilbertFactorization() = default;
  HilbertFactorization(int system_dim, int env_dim);

  int joint_dim() const { return d_s * d_e; }
  ComplexMatrix embed_system(const ComplexMatrix& M) const;  // M ⊗ I_e
  ComplexMatrix embed_env(const ComplexMatrix& B) const;     // I_s ⊗ B
};

}  // namespace decoq

#endif
