#ifndef DECOQ_HARMONIC_HPP
#define DECOQ_HARMONIC_HPP

#include <vector>

#include "decoq/matrix_ops.hpp"

namespace decoq {

/// Operator-valued trigonometric polynomial Σ_k e^{iμ_k t} M_k.
///
/// Canonical form: terms sorted by frequency, frequencies pairwise distinct up to
/// freq_tol (closer terms are merged by matrix addition, keeping the first-seen
/// frequency as the bucket representative), terms with negligible matrix norm dropped.
/// Closed under differentiation, commutation and tensor products.
class HarmonicOperator {
 public:
  struct Term {
    double freq = 0.0;
    ComplexMatrix matrix;
  };

  HarmonicOperator() = default;
  HarmonicOperator(std::vector<Term> terms, double freq_tol = kFreqTol,
                   double drop_tol = kDropTol);

  static HarmonicOperator zero(int dim, double freq_tol = kFreqTol);
  static HarmonicOperator constant(const ComplexMatrix& M, double freq_tol = kFreqTol);
  static HarmonicOperator rotating(double freq, const ComplexMatrix& M,
                                   double freq_tol = kFreqTol);

  int dim() const { return dim_; }
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  double freq_tol() const { return freq_tol_; }

  /// True when every term has frequency within freq_tol of zero (at most one after
  /// canonicalization).
  bool is_constant() const;

  ComplexMatrix evaluate(double t) const;

  /// sqrt(Σ_k ‖M_k‖_F²); the L² norm of the trigonometric polynomial up to normalization.
  double norm() const;

  HarmonicOperator operator+(const HarmonicOperator& other) const;
  HarmonicOperator operator-(const HarmonicOperator& other) const;
  HarmonicOperator scaled(Complex factor) const;
  HarmonicOperator adjoint() const;      // terms (-μ, M†)
  HarmonicOperator derivative() const;   // terms (μ, iμM)
  HarmonicOperator frequency_shifted(double freq) const;  // multiply by e^{iνt}

  /// Structural Hermiticity: for every term (μ,M) there is (−μ,M†) within tol.
  bool is_hermitian_operator(double tol = kMatrixZeroTol) const;

  static constexpr double kDropTol = 1e-14;

 private:
  void canonicalize();

  int dim_ = 0;
  double freq_tol_ = kFreqTol;
  double drop_tol_ = kDropTol;
  std::vector<Term> terms_;
};

/// Term-pairwise commutator: (μ+ν, [M,N]), canonicalized.
HarmonicOperator harmonic_commutator(const HarmonicOperator& A, const HarmonicOperator& B);

/// Term-pairwise product: (μ+ν, MN), canonicalized.
HarmonicOperator harmonic_product(const HarmonicOperator& A, const HarmonicOperator& B);

/// Term-pairwise tensor product: (μ+ν, M⊗N).
HarmonicOperator harmonic_tensor(const HarmonicOperator& A, const HarmonicOperator& B);

/// Heisenberg-picture derivation for a Hermitian, time-independent H:
/// D(A) = dA/dt - i[A,H], i.e. Σ_k e^{iμ_k t}(-i[M_k,H] + iμ_k M_k).
/// Generators are -iH in this codebase, so this is the drift Lie derivative of A.
HarmonicOperator harmonic_derivation(const HarmonicOperator& A, const ComplexMatrix& H);

/// Apply the same linear matrix map to every term (e.g. a Hilbert-space embedding).
template <typename Fn>
HarmonicOperator harmonic_map(const HarmonicOperator& A, Fn&& fn) {
  std::vector<HarmonicOperator::Term> terms;
  terms.reserve(A.terms().size());
  for (const auto& t : A.terms()) terms.push_back({t.freq, fn(t.matrix)});
  return HarmonicOperator(std::move(terms), A.freq_tol());
}

}  // namespace decoq

#endif
