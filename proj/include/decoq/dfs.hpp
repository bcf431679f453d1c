#ifndef DECOQ_DFS_HPP
#define DECOQ_DFS_HPP

#include <optional>
#include <vector>

#include "decoq/builders.hpp"
#include "decoq/distribution.hpp"

namespace decoq {

/// Maximal space of system observables whose generated distribution commutes with
/// every system factor of H_SB. Invariant under ad_{H0} and every ad_{Hi} by
/// construction.
struct InvariantObservableSpace {
  std::vector<ComplexMatrix> basis;  // orthonormal in the Frobenius inner product
  bool pattern_basis = false;        // basis is exactly elementary matrices |i><j|
  std::vector<std::pair<int, int>> pattern;  // (i,j) labels when pattern_basis
  int iterations = 0;

  // generators the space was computed from
  ComplexMatrix H0;
  std::vector<ComplexMatrix> controls;
  std::vector<ComplexMatrix> factors;

  int dimension() const { return int(basis.size()); }
  double projection_residual(const ComplexMatrix& M) const;
  bool contains(const ComplexMatrix& M, double tol) const;
};

/// Solves the inverse problem for H_SB = Σ_k S_k ⊗ B_k with user-supplied system
/// factors S_k: the largest subspace of ∩_k ker(ad_{S_k}) invariant under ad_{H0}
/// and every ad_{Hi}, by the standard fixed-point iteration on vectorized operators.
/// The zero space is a valid result.
InvariantObservableSpace find_invariant_observables(
    const ComplexMatrix& H0, const std::vector<ComplexMatrix>& controls,
    const std::vector<ComplexMatrix>& interaction_system_factors, double tol = 1e-9);

/// Evidence that M leaks out of the invariant space: an ad-word over the generators
/// (0 = H0, k >= 1 = controls[k-1], applied left to right) whose image fails to
/// commute with some interaction factor.
struct LeakageWitness {
  std::vector<int> word;
  int factor_index = 0;
  double norm = 0.0;      // ‖[image, S_k]‖ for the normalized image
  ComplexMatrix image;    // the word image, unit Frobenius norm
};

std::optional<LeakageWitness> leakage_witness(
    const ComplexMatrix& M, const ComplexMatrix& H0,
    const std::vector<ComplexMatrix>& controls,
    const std::vector<ComplexMatrix>& interaction_system_factors, double tol = 1e-9,
    int max_word_len = 6);

/// Commutant of the distribution generated by C: all joint-space H_tau with
/// [T, H_tau] = 0 for every element T, computed as a nullspace of the stacked
/// superoperator. Candidate interactions are time-independent.
OperatorSpace find_invariant_interactions(const HarmonicOperator& C, const ComplexMatrix& H0,
                                          const std::vector<ComplexMatrix>& controls,
                                          const HilbertFactorization& fact,
                                          const DistributionOptions& opts = {},
                                          double tol = 1e-9);

/// Lie-bracket closure of a commutant space: [H_tau, H_i] and [H_tau, drift] must
/// stay inside for every basis element. drift and controls act on the space's own
/// dimension (pass embedded operators for a joint-space commutant).
bool verify_bracket_closure(const OperatorSpace& space, const ComplexMatrix& drift,
                            const std::vector<ComplexMatrix>& controls, double tol = 1e-9);

}  // namespace decoq

#endif
