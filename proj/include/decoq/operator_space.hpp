#ifndef DECOQ_OPERATOR_SPACE_HPP
#define DECOQ_OPERATOR_SPACE_HPP

#include <vector>

#include "decoq/harmonic.hpp"

namespace decoq {

/// Numerically orthonormalized span of HarmonicOperators with per-frequency bucketing.
///
/// Span maintenance works on the positive-spectrum representation: a term (μ,M) maps
/// to coefficient M in bucket |μ| for μ ≥ 0 and to M† for μ < 0. For Hermitian
/// interaction Hamiltonians an operator and its conjugate counterpart carry the same
/// decoupling information, so the quotient does not change any commutation verdict;
/// it keeps e.g. cos(ωt)·M and sin(ωt)·M from being counted as independent directions.
/// Inner product: Σ over matched buckets of tr(M_k† N_k).
///
/// An optional projector restricts all rank and membership decisions to a subspace
/// (compressions P·M·P); stored basis elements keep their projected coefficients.
class OperatorSpace {
 public:
  explicit OperatorSpace(int matrix_dim, double rank_tol = kRankTol,
                         double freq_tol = kFreqTol);

  /// All rank/membership decisions use P·M·P instead of M. Must be set while empty.
  void set_projector(const ComplexMatrix& P);

  /// Orthonormalizes T against the current basis (modified Gram-Schmidt with a
  /// re-orthogonalization pass) and inserts the residual direction if its norm
  /// exceeds rank_tol times the input norm. Returns true when the rank grew.
  bool insert(const HarmonicOperator& T);

  bool contains(const HarmonicOperator& T) const { return contains(T, rank_tol_); }
  bool contains(const HarmonicOperator& T, double rel_tol) const;

  /// Norm of T after projecting out the basis (in the representation inner product).
  double residual_norm(const HarmonicOperator& T) const;

  /// Norm of T in the representation inner product (after projector compression).
  double rep_norm(const HarmonicOperator& T) const;

  int dimension() const { return int(basis_.size()); }
  int matrix_dim() const { return matrix_dim_; }
  int frequency_bucket_count() const { return int(bucket_freqs_.size()); }
  const std::vector<double>& bucket_frequencies() const { return bucket_freqs_; }
  double rank_tol() const { return rank_tol_; }
  double freq_tol() const { return freq_tol_; }

  /// Canonical positive-spectrum originals, unit norm, in insertion order.
  const std::vector<HarmonicOperator>& basis() const { return basis_; }

  /// max |<b_i, b_j> - delta_ij| over the basis, in the representation inner product.
  double gram_defect() const;

 private:
  struct Rep {
    std::vector<ComplexMatrix> slots;    // projected, aligned with bucket_freqs_
    std::vector<ComplexMatrix> full;     // unprojected counterparts (bracketing material)
    std::vector<std::pair<double, std::pair<ComplexMatrix, ComplexMatrix>>>
        extra;  // frequencies not yet registered: (freq, (projected, full))
    double norm() const;
  };

  int find_bucket(double freq) const;
  Rep make_rep(const HarmonicOperator& T) const;
  ComplexMatrix compress(const ComplexMatrix& M) const;
  // residual after projection; updates both the projected and full sides
  double project_out(Rep& rep) const;

  int matrix_dim_;
  double rank_tol_;
  double freq_tol_;
  ComplexMatrix projector_;  // size 0 → identity
  std::vector<double> bucket_freqs_;
  std::vector<std::vector<ComplexMatrix>> reps_;       // projected
  std::vector<std::vector<ComplexMatrix>> reps_full_;  // unprojected
  std::vector<HarmonicOperator> basis_;
};

/// Modified Gram-Schmidt over a list of operators; near-dependent inputs are dropped.
OperatorSpace orthonormalize(const std::vector<HarmonicOperator>& ops,
                             double rank_tol = kRankTol);

}  // namespace decoq

#endif
