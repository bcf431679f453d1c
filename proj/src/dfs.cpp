#include "decoq/dfs.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include <Eigen/SVD>

namespace decoq {

namespace {

// superoperator of M -> [M, S], column-major vectorization
ComplexMatrix ad_superop(const ComplexMatrix& S) {
  ComplexMatrix I = ComplexMatrix::Identity(S.rows(), S.cols());
  return tensor(S.transpose(), I) - tensor(I, S);
}

// superoperator of H -> [T, H]
ComplexMatrix left_bracket_superop(const ComplexMatrix& T) {
  ComplexMatrix I = ComplexMatrix::Identity(T.rows(), T.cols());
  return tensor(I, T) - tensor(T.transpose(), I);
}

ComplexMatrix unvec(const Eigen::VectorXcd& v, int n) {
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

Eigen::VectorXcd vec(const ComplexMatrix& M) {
  return Eigen::Map<const Eigen::VectorXcd>(M.data(), M.size());
}

// orthonormal nullspace basis of A, singular values below tol*max(1, sigma_max)
template <typename Svd>
ComplexMatrix nullspace_from(const Svd& svd, Eigen::Index cols, double tol) {
  const auto& sv = svd.singularValues();
  double cutoff = tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cutoff) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

ComplexMatrix nullspace(const ComplexMatrix& A, double tol) {
  if (A.cols() > 64) {
    Eigen::BDCSVD<ComplexMatrix> svd(A, Eigen::ComputeFullV);
    return nullspace_from(svd, A.cols(), tol);
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(A, Eigen::ComputeFullV);
  return nullspace_from(svd, A.cols(), tol);
}

}  // namespace

double InvariantObservableSpace::projection_residual(const ComplexMatrix& M) const {
  Eigen::VectorXcd v = vec(M);
  for (const auto& B : basis) v -= matrix_inner(B, M) * vec(B);
  return v.norm();
}

bool InvariantObservableSpace::contains(const ComplexMatrix& M, double tol) const {
  return projection_residual(M) <= tol * std::max(M.norm(), 1e-30);
}

InvariantObservableSpace find_invariant_observables(
    const ComplexMatrix& H0, const std::vector<ComplexMatrix>& controls,
    const std::vector<ComplexMatrix>& interaction_system_factors, double tol) {
  require_square(H0, "find_invariant_observables");
  const int n = int(H0.rows());
  if (interaction_system_factors.empty())
    throw std::invalid_argument(
        "find_invariant_observables: no system factors; supply the decomposition of H_SB");
  for (const auto& S : interaction_system_factors) require_same_dim(H0, S, "invariant_observables");
  for (const auto& Hi : controls) require_same_dim(H0, Hi, "invariant_observables");

  InvariantObservableSpace out;
  out.H0 = H0;
  out.controls = controls;
  out.factors = interaction_system_factors;

  // V0 = intersection of ker(ad_{S_k})
  ComplexMatrix stacked(int(interaction_system_factors.size()) * n * n, n * n);
  for (size_t k = 0; k < interaction_system_factors.size(); ++k)
    stacked.middleRows(int(k) * n * n, n * n) = ad_superop(interaction_system_factors[k]);
  ComplexMatrix B = nullspace(stacked, tol);

  // generators whose ad must keep the space inside itself
  std::vector<ComplexMatrix> gens;
  gens.push_back(ad_superop(H0));
  for (const auto& Hi : controls) gens.push_back(ad_superop(Hi));

  // V_{n+1} = { v in V_n : ad_G v in V_n for all G }
  for (int iter = 0; iter < n * n && B.cols() > 0; ++iter) {
    out.iterations = iter;
    ComplexMatrix P = B * B.adjoint();
    ComplexMatrix A(int(gens.size()) * n * n, B.cols());
    for (size_t g = 0; g < gens.size(); ++g) {
      ComplexMatrix img = gens[g] * B;
      A.middleRows(int(g) * n * n, n * n) = img - P * img;
    }
    ComplexMatrix Z = nullspace(A, tol);
    if (Z.cols() == B.cols()) break;  // fixed point
    B = B * Z;
    out.iterations = iter + 1;
  }

  for (Eigen::Index c = 0; c < B.cols(); ++c) out.basis.push_back(unvec(B.col(c), n));

  // canonical |i><j| basis when every elementary matrix is either inside or orthogonal
  const double pattern_tol = 1e-6;
  std::vector<std::pair<int, int>> inside;
  bool clean = true;
  for (int j = 0; j < n && clean; ++j) {
    for (int i = 0; i < n && clean; ++i) {
      double p = (B.adjoint() * vec(ketbra(i, j, n))).norm();
      if (p > 1.0 - pattern_tol)
        inside.emplace_back(i, j);
      else if (p > pattern_tol)
        clean = false;
    }
  }
  if (clean && int(inside.size()) == B.cols()) {
    std::sort(inside.begin(), inside.end());
    out.basis.clear();
    for (auto [i, j] : inside) out.basis.push_back(ketbra(i, j, n));
    out.pattern = std::move(inside);
    out.pattern_basis = true;
  }
  return out;
}

std::optional<LeakageWitness> leakage_witness(const ComplexMatrix& M, const ComplexMatrix& H0,
                                              const std::vector<ComplexMatrix>& controls,
                                              const std::vector<ComplexMatrix>& factors,
                                              double tol, int max_word_len) {
  require_square(M, "leakage_witness");
  std::vector<ComplexMatrix> gens;
  gens.push_back(H0);
  for (const auto& Hi : controls) gens.push_back(Hi);

  struct Node {
    ComplexMatrix op;
    std::vector<int> word;
  };
  std::deque<Node> queue;
  queue.push_back({M / std::max(M.norm(), 1e-300), {}});
  while (!queue.empty()) {
    Node node = std::move(queue.front());
    queue.pop_front();
    for (size_t k = 0; k < factors.size(); ++k) {
      double nrm = commutator(node.op, factors[k]).norm();
      if (nrm > tol * std::max(1.0, factors[k].norm()))
        return LeakageWitness{node.word, int(k), nrm, node.op};
    }
    if (int(node.word.size()) >= max_word_len) continue;
    for (size_t g = 0; g < gens.size(); ++g) {
      ComplexMatrix img = commutator(node.op, gens[g]);
      double nrm = img.norm();
      if (nrm <= 1e-12) continue;
      auto word = node.word;
      word.push_back(int(g));
      queue.push_back({img / nrm, std::move(word)});
    }
  }
  return std::nullopt;
}

OperatorSpace find_invariant_interactions(const HarmonicOperator& C, const ComplexMatrix& H0,
                                          const std::vector<ComplexMatrix>& controls,
                                          const HilbertFactorization& fact,
                                          const DistributionOptions& opts, double tol) {
  auto [dist, report] = generate_distribution(C, H0, controls, opts);
  (void)report;
  const int D = fact.joint_dim();

  std::vector<ComplexMatrix> coeffs;
  for (const auto& T : dist.basis()) {
    for (const auto& term : T.terms()) {
      if (dist.matrix_dim() == fact.d_s)
        coeffs.push_back(fact.embed_system(term.matrix));
      else if (dist.matrix_dim() == D)
        coeffs.push_back(term.matrix);
      else
        throw std::invalid_argument(
            "find_invariant_interactions: distribution fits neither system nor joint dimension");
    }
  }

  OperatorSpace out(D, kRankTol, C.freq_tol());
  if (coeffs.empty()) {
    // empty distribution: every interaction is invariant
    for (int c = 0; c < D * D; ++c) {
      ComplexMatrix E = ComplexMatrix::Zero(D, D);
      E(c % D, c / D) = 1.0;
      out.insert(HarmonicOperator::constant(E));
    }
    return out;
  }

  ComplexMatrix A(int(coeffs.size()) * D * D, D * D);
  for (size_t m = 0; m < coeffs.size(); ++m)
    A.middleRows(int(m) * D * D, D * D) = left_bracket_superop(coeffs[m]);
  ComplexMatrix N = nullspace(A, tol);
  for (Eigen::Index c = 0; c < N.cols(); ++c)
    out.insert(HarmonicOperator::constant(unvec(N.col(c), D)));
  return out;
}

bool verify_bracket_closure(const OperatorSpace& space, const ComplexMatrix& drift,
                            const std::vector<ComplexMatrix>& controls, double tol) {
  std::vector<ComplexMatrix> gens;
  gens.push_back(drift);
  for (const auto& Hi : controls) gens.push_back(Hi);
  for (const auto& T : space.basis()) {
    for (const auto& G : gens) {
      if (G.rows() != space.matrix_dim())
        throw std::invalid_argument("verify_bracket_closure: generator dimension mismatch");
      HarmonicOperator bracket = harmonic_commutator(T, HarmonicOperator::constant(G));
      if (space.residual_norm(bracket) > tol * std::max(1.0, G.norm())) return false;
    }
  }
  return true;
}

}  // namespace decoq
